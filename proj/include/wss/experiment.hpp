#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "wss/config.hpp"
#include "wss/policy.hpp"
#include "wss/sns_frontend.hpp"

namespace wss {

/// Ground truth of one replication, shared by every policy run in it.
class ReplicationEnvironment {
public:
    ReplicationEnvironment(const ExperimentConfig& config, const BandStatistics& stats,
                           std::uint64_t replication_seed);

    const BandStatistics& statistics() const { return stats_; }
    const SensingMatrix& sensing_matrix() const { return matrix_; }
    std::span<const Status> occupancy(std::int64_t slot) const;
    std::uint64_t seed() const { return seed_; }

private:
    const ExperimentConfig& config_;
    BandStatistics stats_;
    std::uint64_t seed_;
    std::vector<Status> trajectory_; // horizon x n_bands, row-major
    SensingMatrix matrix_;
};

/// Applies the sparsity criterion to the environment's true occupancy.
class OracleSensor final : public SlotSensor {
public:
    OracleSensor(const ReplicationEnvironment& env, int k_branches);
    SenseResult sense(std::int64_t slot, std::span<const int> selected,
                      std::span<const double> vacancy_prior) override;

private:
    const ReplicationEnvironment& env_;
    int k_branches_;
};

/// Synthesizes spectra, measures them through the mixing matrix and runs the
/// full recovery chain. Slot content is seeded per slot so every policy sees
/// the same spectra.
class SignalSensor final : public SlotSensor {
public:
    SignalSensor(const ReplicationEnvironment& env, const ExperimentConfig& config);
    SenseResult sense(std::int64_t slot, std::span<const int> selected,
                      std::span<const double> vacancy_prior) override;

private:
    const ReplicationEnvironment& env_;
    const ExperimentConfig& config_;
    double noise_power_;
};

struct PolicySeries {
    PolicyMode mode = PolicyMode::IMP;
    std::vector<double> mean_throughput;          ///< per slot, over replications
    std::vector<double> mean_regret;              ///< cumulative, against IMP
    std::vector<double> final_throughput;         ///< cumulative per replication
    std::vector<double> final_regret;             ///< cumulative per replication
    std::vector<std::int64_t> sizing_switch_slot; ///< -1 when the switch never happened
};

struct MetricSeries {
    std::int64_t horizon = 0;
    int replications = 0;
    std::vector<PolicySeries> policies; ///< in requested order
    const PolicySeries& at(PolicyMode mode) const;
};

/// Cumulative sum of (imp - policy). Throws UsageError on length mismatch.
std::vector<double> compute_regret(std::span<const double> policy, std::span<const double> imp);

PolicyConfig policy_config_for(const ExperimentConfig& config, PolicyMode mode,
                               const BandStatistics& stats);

/// Runs every requested policy (plus IMP as the regret reference) on each
/// replication with common random numbers, then averages per slot. The result
/// does not depend on the number of workers.
MetricSeries run_experiment(const ExperimentConfig& config);

} // namespace wss
