#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wss/random.hpp"
#include "wss/reconstruction.hpp"
#include "wss/sns_frontend.hpp"
#include "wss/spectrum_model.hpp"

namespace wss {

enum class PolicyMode { LDM, OLDM, IMP };

std::string_view to_string(PolicyMode mode);
PolicyMode parse_policy_mode(std::string_view name);

/// 2x2 table indexed [from][to] over {vacant, busy}.
using TransitionTable = std::array<std::array<double, 2>, 2>;
using TransitionCounts = std::array<std::array<std::int64_t, 2>, 2>;

/// Row-normalized transition estimate: p[u][v] = C[u][v] / (C[u][v] + C[u][u])
/// for v != u, and p[u][u] = 1 - p[u][v].
TransitionTable estimate_transition(const TransitionCounts& counts);

/// What a learner knows about every band.
struct BeliefState {
    std::vector<double> omega;             ///< immediate vacancy probability per band
    std::vector<TransitionCounts> counts;  ///< observed transitions, starting at 1
    std::vector<TransitionTable> p_hat;
    std::vector<std::int64_t> obs_count;   ///< transition observations per band
    std::int64_t slot_index = 0;

    /// Uninformed learner: omega = 0.5, every count 1, every estimate 0.5.
    static BeliefState uninformed(int n_bands);

    /// Learner that knows the true statistics; starts at the stationary vacancy.
    static BeliefState informed(const BandStatistics& truth);

    int n_bands() const { return static_cast<int>(omega.size()); }

    /// p0_hat = p_hat[1][0] / (p_hat[1][0] + p_hat[0][1]) per band.
    std::vector<double> stationary_estimate() const;
};

/// Record one transition per band of `selected` from two consecutive
/// successful senses of the same set.
void update_counts(BeliefState& belief, std::span<const int> selected,
                   std::span<const Status> previous, std::span<const Status> current);

enum class Phase : std::uint8_t { Explore, Exploit };

struct SlotOutcome {
    std::int64_t slot = 0;
    BandSet selected;
    std::vector<Status> statuses;
    bool failed = false;
    int throughput = 0; ///< vacant bands identified, 0 on failure
    Phase phase = Phase::Exploit;
};

/// Advance every omega one slot: observed bands of a successful sense take
/// p_hat[s][0]; all other bands (or all bands on failure) take
/// (1 - omega) * p_hat[1][0] + omega * p_hat[0][0].
void propagate_belief(BeliefState& belief, const SlotOutcome& outcome);

/// min(1, L / b) for block index b >= 1.
double epsilon(std::int64_t block_index, double exploration_coefficient);

/// Zero-based group `group` of the contiguous exploration partition:
/// bands [group*K, min((group+1)*K, N)).
BandSet explore_schedule(int group, int n_bands, int k_branches);

/// The `set_size` bands with the largest omega (ties to lower index),
/// returned in ascending band order.
BandSet exploit_select(std::span<const double> omega, int set_size);

struct PolicyConfig {
    int n_bands = 8;
    int k_branches = 4;
    std::int64_t horizon = 10000;
    double exploration_coefficient = 10.0; ///< L
    double mu = 0.45;
    double delta = 0.1;
    PolicyMode mode = PolicyMode::OLDM;
    /// Required by IMP, ignored by the learning policies.
    std::optional<BandStatistics> known_statistics;
};

/// Throws ConfigError on the first inconsistent field.
void validate(const PolicyConfig& config);

/// Senses a chosen band set at a given slot. Implementations own the ground
/// truth and the reconstruction mode.
class SlotSensor {
public:
    virtual ~SlotSensor() = default;
    virtual SenseResult sense(std::int64_t slot, std::span<const int> selected,
                              std::span<const double> vacancy_prior) = 0;
};

struct PolicyRun {
    std::vector<SlotOutcome> slots;
    BeliefState final_belief;
    /// Slot at which OLDM first sized its set from estimates, if it did.
    std::optional<std::int64_t> sizing_switch_slot;
};

/// Runs LDM, OLDM or IMP for `config.horizon` slots.
///
/// Slots are grouped into blocks of 2*ceil(N/K). A learning policy explores a
/// block with probability epsilon(b, L): every exploration group is sensed for
/// two consecutive slots and contributes one transition per band. Otherwise
/// the block exploits: each slot senses the top-M bands by omega. LDM keeps
/// M = K; OLDM keeps M = K until every band has at least Q observations, then
/// re-sizes M from its stationary estimates at each exploitation block. IMP
/// always exploits with the true statistics and their optimal M.
PolicyRun run_policy(const PolicyConfig& config, SlotSensor& sensor, Rng& rng);

} // namespace wss
