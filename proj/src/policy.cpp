#include "wss/policy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wss/error.hpp"
#include "wss/selection_optimizer.hpp"

namespace wss {

std::string_view to_string(PolicyMode mode) {
    switch (mode) {
    case PolicyMode::LDM:
        return "LDM";
    case PolicyMode::OLDM:
        return "OLDM";
    case PolicyMode::IMP:
        return "IMP";
    }
    return "?";
}

PolicyMode parse_policy_mode(std::string_view name) {
    std::string upper(name);
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (upper == "LDM") {
        return PolicyMode::LDM;
    }
    if (upper == "OLDM") {
        return PolicyMode::OLDM;
    }
    if (upper == "IMP") {
        return PolicyMode::IMP;
    }
    throw ConfigError("unknown policy '" + std::string(name) + "' (expected LDM, OLDM or IMP)");
}

TransitionTable estimate_transition(const TransitionCounts& counts) {
    TransitionTable p{};
    for (int u = 0; u < 2; ++u) {
        const int v = 1 - u;
        const auto stay = static_cast<double>(counts[u][u]);
        const auto leave = static_cast<double>(counts[u][v]);
        p[u][v] = leave / (leave + stay);
        p[u][u] = 1.0 - p[u][v];
    }
    return p;
}

BeliefState BeliefState::uninformed(int n_bands) {
    BeliefState b;
    b.omega.assign(n_bands, 0.5);
    TransitionCounts ones{};
    for (auto& row : ones) {
        row.fill(1);
    }
    b.counts.assign(n_bands, ones);
    b.p_hat.assign(n_bands, estimate_transition(ones));
    b.obs_count.assign(n_bands, 0);
    return b;
}

BeliefState BeliefState::informed(const BandStatistics& truth) {
    BeliefState b = uninformed(truth.n_bands());
    b.omega = stationary_vacancy(truth);
    for (int n = 0; n < truth.n_bands(); ++n) {
        b.p_hat[n] = {{{truth.p00(n), truth.p01(n)}, {truth.p10(n), truth.p11(n)}}};
    }
    return b;
}

std::vector<double> BeliefState::stationary_estimate() const {
    std::vector<double> p0(p_hat.size());
    for (std::size_t n = 0; n < p_hat.size(); ++n) {
        const double to_vacant = p_hat[n][1][0];
        const double to_busy = p_hat[n][0][1];
        p0[n] = to_vacant / (to_vacant + to_busy);
    }
    return p0;
}

void update_counts(BeliefState& belief, std::span<const int> selected,
                   std::span<const Status> previous, std::span<const Status> current) {
    if (previous.size() != selected.size() || current.size() != selected.size()) {
        throw UsageError("status vectors must match the selected band list");
    }
    for (std::size_t j = 0; j < selected.size(); ++j) {
        const int n = selected[j];
        if (n < 0 || n >= belief.n_bands()) {
            throw UsageError("band index " + std::to_string(n) + " out of range");
        }
        ++belief.counts[n][previous[j]][current[j]];
        ++belief.obs_count[n];
        belief.p_hat[n] = estimate_transition(belief.counts[n]);
    }
}

void propagate_belief(BeliefState& belief, const SlotOutcome& outcome) {
    std::vector<double> next(belief.omega.size());
    for (std::size_t n = 0; n < next.size(); ++n) {
        const auto& p = belief.p_hat[n];
        const double w = belief.omega[n];
        next[n] = (1.0 - w) * p[1][0] + w * p[0][0];
    }
    if (!outcome.failed) {
        for (std::size_t j = 0; j < outcome.selected.size(); ++j) {
            const int n = outcome.selected[j];
            next[n] = belief.p_hat[n][outcome.statuses[j]][0];
        }
    }
    for (double& w : next) {
        w = std::clamp(w, 0.0, 1.0);
    }
    belief.omega = std::move(next);
    ++belief.slot_index;
}

double epsilon(std::int64_t block_index, double exploration_coefficient) {
    if (block_index < 1) {
        throw UsageError("block index starts at 1");
    }
    return std::min(1.0, exploration_coefficient / static_cast<double>(block_index));
}

BandSet explore_schedule(int group, int n_bands, int k_branches) {
    const int groups = (n_bands + k_branches - 1) / k_branches;
    if (group < 0 || group >= groups) {
        throw UsageError("exploration group " + std::to_string(group) + " outside [0, " +
                         std::to_string(groups) + ")");
    }
    BandSet out;
    for (int n = group * k_branches; n < std::min((group + 1) * k_branches, n_bands); ++n) {
        out.push_back(n);
    }
    return out;
}

BandSet exploit_select(std::span<const double> omega, int set_size) {
    if (set_size < 0 || set_size > static_cast<int>(omega.size())) {
        throw UsageError("set size " + std::to_string(set_size) + " outside [0, N]");
    }
    BandSet order = rank_by_vacancy(omega);
    order.resize(static_cast<std::size_t>(set_size));
    std::sort(order.begin(), order.end());
    return order;
}

void validate(const PolicyConfig& config) {
    if (config.n_bands < 1) {
        throw ConfigError("n_bands must be at least 1");
    }
    if (config.k_branches < 1 || config.k_branches > config.n_bands) {
        throw ConfigError("k_branches must satisfy 1 <= K <= N (K=" +
                          std::to_string(config.k_branches) + ", N=" +
                          std::to_string(config.n_bands) + ")");
    }
    if (config.horizon < 0) {
        throw ConfigError("horizon must be nonnegative");
    }
    if (!(config.exploration_coefficient > 0.0)) {
        throw ConfigError("exploration coefficient L must be positive");
    }
    if (!(config.mu > 0.0 && config.mu < 1.0)) {
        throw ConfigError("mu must lie in (0, 1)");
    }
    if (!(config.delta > 0.0 && config.delta < 1.0)) {
        throw ConfigError("delta must lie in (0, 1)");
    }
    if (config.mode == PolicyMode::IMP) {
        if (!config.known_statistics) {
            throw ConfigError("IMP requires the true band statistics");
        }
        if (config.known_statistics->n_bands() != config.n_bands) {
            throw ConfigError("known statistics describe a different number of bands");
        }
    }
}

namespace {

class PolicyRunner {
public:
    PolicyRunner(const PolicyConfig& config, SlotSensor& sensor)
        : config_(config),
          sensor_(sensor),
          belief_(config.mode == PolicyMode::IMP ? BeliefState::informed(*config.known_statistics)
                                                 : BeliefState::uninformed(config.n_bands)),
          set_size_(config.k_branches) {
        if (config.mode == PolicyMode::IMP) {
            set_size_ = optimize_size(stationary_vacancy(*config.known_statistics),
                                      config.k_branches)
                            .size;
        }
        if (config.mode == PolicyMode::OLDM) {
            observation_target_ = exploration_threshold(config.n_bands, config.k_branches,
                                                        config.mu, config.delta)
                                      .observations;
        }
        run_.slots.reserve(static_cast<std::size_t>(config.horizon));
    }

    PolicyRun run(Rng& rng) {
        const int groups = (config_.n_bands + config_.k_branches - 1) / config_.k_branches;
        const std::int64_t block_length = 2 * groups;
        for (std::int64_t block = 1; !done(); ++block) {
            bool explore = false;
            if (config_.mode != PolicyMode::IMP) {
                explore = uniform01(rng) < epsilon(block, config_.exploration_coefficient);
            }
            if (explore) {
                run_explore_block(groups);
            } else {
                run_exploit_block(block_length);
            }
        }
        run_.final_belief = std::move(belief_);
        return std::move(run_);
    }

private:
    bool done() const { return now_ >= config_.horizon; }

    const SlotOutcome& sense(const BandSet& selected, Phase phase) {
        std::vector<double> prior(selected.size());
        for (std::size_t j = 0; j < selected.size(); ++j) {
            prior[j] = belief_.omega[selected[j]];
        }
        SenseResult result = sensor_.sense(now_, selected, prior);
        SlotOutcome outcome;
        outcome.slot = now_;
        outcome.selected = selected;
        outcome.failed = result.failed;
        outcome.throughput = result.failed ? 0 : result.vacant_count();
        outcome.statuses = std::move(result.statuses);
        outcome.phase = phase;
        run_.slots.push_back(std::move(outcome));
        ++now_;
        return run_.slots.back();
    }

    // A pair is only informative when the slot would have succeeded whatever the
    // band's own status was; otherwise surviving slots over-represent vacancy.
    void learn(const SlotOutcome* previous, const SlotOutcome& current) {
        if (config_.mode != PolicyMode::IMP && previous != nullptr && !previous->failed &&
            !current.failed && previous->selected == current.selected) {
            const int m = static_cast<int>(current.selected.size());
            const int gamma = gamma_threshold(m, config_.k_branches);
            const auto busy = static_cast<int>(
                std::count(current.statuses.begin(), current.statuses.end(), kBusy));
            BandSet bands;
            std::vector<Status> from;
            std::vector<Status> to;
            for (std::size_t j = 0; j < current.selected.size(); ++j) {
                if (busy - current.statuses[j] > gamma - 1) {
                    continue;
                }
                bands.push_back(current.selected[j]);
                from.push_back(previous->statuses[j]);
                to.push_back(current.statuses[j]);
            }
            update_counts(belief_, bands, from, to);
        }
        propagate_belief(belief_, current);
    }

    void run_explore_block(int groups) {
        for (int g = 0; g < groups && !done(); ++g) {
            const BandSet selected = explore_schedule(g, config_.n_bands, config_.k_branches);
            std::optional<SlotOutcome> first;
            for (int q = 0; q < 2 && !done(); ++q) {
                const SlotOutcome& outcome = sense(selected, Phase::Explore);
                learn(first ? &*first : nullptr, outcome);
                if (!first) {
                    first = outcome;
                }
            }
        }
    }

    void run_exploit_block(std::int64_t block_length) {
        if (config_.mode == PolicyMode::OLDM) {
            maybe_resize();
        }
        std::optional<SlotOutcome> previous;
        for (std::int64_t i = 0; i < block_length && !done(); ++i) {
            const BandSet selected = exploit_select(belief_.omega, set_size_);
            const SlotOutcome& outcome = sense(selected, Phase::Exploit);
            learn(previous ? &*previous : nullptr, outcome);
            previous = outcome;
        }
    }

    void maybe_resize() {
        if (!run_.sizing_switch_slot) {
            const bool enough = std::all_of(belief_.obs_count.begin(), belief_.obs_count.end(),
                                            [&](std::int64_t c) { return c >= observation_target_; });
            if (!enough) {
                return;
            }
            run_.sizing_switch_slot = now_;
        }
        set_size_ = optimize_size(belief_.stationary_estimate(), config_.k_branches).size;
    }

    const PolicyConfig& config_;
    SlotSensor& sensor_;
    BeliefState belief_;
    int set_size_;
    std::int64_t observation_target_ = 0;
    std::int64_t now_ = 0;
    PolicyRun run_;
};

} // namespace

PolicyRun run_policy(const PolicyConfig& config, SlotSensor& sensor, Rng& rng) {
    validate(config);
    return PolicyRunner(config, sensor).run(rng);
}

} // namespace wss
