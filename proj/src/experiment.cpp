#include "wss/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "wss/error.hpp"
#include "wss/reconstruction.hpp"

namespace wss {

namespace {

SensingMatrix draw_matrix_for(const ExperimentConfig& config, std::uint64_t seed,
                              std::uint64_t index) {
    Rng rng(derive_seed(seed, Stream::SensingMatrix, index));
    return draw_sensing_matrix(config.k_branches, config.n_bands, rng);
}

} // namespace

ReplicationEnvironment::ReplicationEnvironment(const ExperimentConfig& config,
                                               const BandStatistics& stats,
                                               std::uint64_t replication_seed)
    : config_(config),
      stats_(stats),
      seed_(replication_seed),
      matrix_(draw_matrix_for(config, replication_seed, 0)) {
    const auto n = static_cast<std::size_t>(stats.n_bands());
    trajectory_.resize(static_cast<std::size_t>(config.horizon) * n);
    Rng rng(derive_seed(replication_seed, Stream::Occupancy));
    OccupancyState state = init_occupancy(stats, rng);
    for (std::int64_t t = 0; t < config.horizon; ++t) {
        if (t > 0) {
            state = step_occupancy(state, stats, rng);
        }
        std::copy(state.statuses.begin(), state.statuses.end(),
                  trajectory_.begin() + static_cast<std::ptrdiff_t>(t * static_cast<std::int64_t>(n)));
    }
}

std::span<const Status> ReplicationEnvironment::occupancy(std::int64_t slot) const {
    const auto n = static_cast<std::size_t>(stats_.n_bands());
    if (slot < 0 || slot >= config_.horizon) {
        throw UsageError("slot " + std::to_string(slot) + " outside the simulated horizon");
    }
    return std::span<const Status>(trajectory_).subspan(static_cast<std::size_t>(slot) * n, n);
}

OracleSensor::OracleSensor(const ReplicationEnvironment& env, int k_branches)
    : env_(env), k_branches_(k_branches) {}

SenseResult OracleSensor::sense(std::int64_t slot, std::span<const int> selected,
                                std::span<const double> /*vacancy_prior*/) {
    const auto truth = env_.occupancy(slot);
    std::vector<Status> picked(selected.size());
    for (std::size_t j = 0; j < selected.size(); ++j) {
        picked[j] = truth[static_cast<std::size_t>(selected[j])];
    }
    return oracle_sense(picked, k_branches_);
}

SignalSensor::SignalSensor(const ReplicationEnvironment& env, const ExperimentConfig& config)
    : env_(env), config_(config), noise_power_(noise_power_for_snr(config.signal_power, config.snr_db)) {}

SenseResult SignalSensor::sense(std::int64_t slot, std::span<const int> selected,
                                std::span<const double> vacancy_prior) {
    Rng rng(derive_seed(env_.seed(), Stream::SlotSignal, static_cast<std::uint64_t>(slot)));
    OccupancyState state;
    const auto truth = env_.occupancy(slot);
    state.statuses.assign(truth.begin(), truth.end());
    state.slot_index = slot;
    const BandSpectra spectra =
        synthesize_band_spectra(state, config_.bins_per_band, config_.signal_power, rng);

    const SensingMatrix matrix = config_.redraw_matrix_per_slot
        ? draw_matrix_for(config_, env_.seed(), static_cast<std::uint64_t>(slot) + 1)
        : env_.sensing_matrix();
    const Eigen::MatrixXd a_sub = select_submatrix(matrix, selected);
    const MeasurementBatch batch = measure(a_sub, select_rows(spectra, selected), selected, noise_power_, rng);

    RecoveryConfig cfg;
    cfg.prior_vacancy.assign(vacancy_prior.begin(), vacancy_prior.end());
    cfg.signal_variance = config_.signal_power;
    cfg.noise_variance = noise_power_;
    cfg.search_breadth = config_.fbmp_breadth;
    cfg.energy_fa_rate = config_.energy_fa_rate;
    cfg.residual_threshold = config_.residual_threshold;
    return signal_sense(batch, a_sub, cfg, config_.k_branches);
}

const PolicySeries& MetricSeries::at(PolicyMode mode) const {
    for (const auto& p : policies) {
        if (p.mode == mode) {
            return p;
        }
    }
    throw UsageError("policy " + std::string(to_string(mode)) + " was not part of the experiment");
}

std::vector<double> compute_regret(std::span<const double> policy, std::span<const double> imp) {
    if (policy.size() != imp.size()) {
        throw UsageError("regret needs equal-length throughput series");
    }
    std::vector<double> out(policy.size());
    double acc = 0.0;
    for (std::size_t t = 0; t < policy.size(); ++t) {
        acc += imp[t] - policy[t];
        out[t] = acc;
    }
    return out;
}

PolicyConfig policy_config_for(const ExperimentConfig& config, PolicyMode mode,
                               const BandStatistics& stats) {
    PolicyConfig pc;
    pc.n_bands = config.n_bands;
    pc.k_branches = config.k_branches;
    pc.horizon = config.horizon;
    pc.exploration_coefficient = config.exploration_coefficient;
    pc.mu = config.mu;
    pc.delta = config.delta;
    pc.mode = mode;
    if (mode == PolicyMode::IMP) {
        pc.known_statistics = stats;
    }
    return pc;
}

namespace {

struct ReplicationResult {
    // Indexed like the experiment's run list; throughput per slot.
    std::vector<std::vector<int>> throughput;
    std::vector<std::int64_t> switch_slot;
};

ReplicationResult run_replication(const ExperimentConfig& config, const BandStatistics& stats,
                                  std::span<const PolicyMode> runs, int replication) {
    const std::uint64_t seed = derive_seed(config.seed, static_cast<std::uint64_t>(replication));
    const ReplicationEnvironment env(config, stats, seed);
    ReplicationResult out;
    for (PolicyMode mode : runs) {
        const PolicyConfig pc = policy_config_for(config, mode, stats);
        Rng rng(derive_seed(seed, Stream::Policy));
        PolicyRun run;
        if (config.rs_mode == RsMode::Oracle) {
            OracleSensor sensor(env, config.k_branches);
            run = run_policy(pc, sensor, rng);
        } else {
            SignalSensor sensor(env, config);
            run = run_policy(pc, sensor, rng);
        }
        std::vector<int> tp(run.slots.size());
        std::transform(run.slots.begin(), run.slots.end(), tp.begin(),
                       [](const SlotOutcome& s) { return s.throughput; });
        out.throughput.push_back(std::move(tp));
        out.switch_slot.push_back(run.sizing_switch_slot.value_or(-1));
    }
    return out;
}

} // namespace

MetricSeries run_experiment(const ExperimentConfig& config) {
    validate(config);
    const BandStatistics stats = resolve_statistics(config);

    // IMP always runs: it is the regret reference even when not reported.
    std::vector<PolicyMode> runs = config.policies;
    if (std::find(runs.begin(), runs.end(), PolicyMode::IMP) == runs.end()) {
        runs.push_back(PolicyMode::IMP);
    }
    const auto imp_index = static_cast<std::size_t>(
        std::find(runs.begin(), runs.end(), PolicyMode::IMP) - runs.begin());

    std::vector<ReplicationResult> results(static_cast<std::size_t>(config.replications));
    const unsigned hw = std::max(1U, std::thread::hardware_concurrency());
    const int workers = std::min(config.replications,
                                 config.workers > 0 ? config.workers : static_cast<int>(hw));
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (int r = next++; r < config.replications; r = next++) {
            try {
                results[static_cast<std::size_t>(r)] = run_replication(config, stats, runs, r);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back(worker);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    // Reduce in replication order so the output is independent of scheduling.
    const auto horizon = static_cast<std::size_t>(config.horizon);
    const double reps = config.replications;
    std::vector<std::vector<double>> mean(runs.size(), std::vector<double>(horizon, 0.0));
    for (const auto& rep : results) {
        for (std::size_t p = 0; p < runs.size(); ++p) {
            for (std::size_t t = 0; t < horizon; ++t) {
                mean[p][t] += rep.throughput[p][t];
            }
        }
    }
    for (auto& series : mean) {
        for (double& v : series) {
            v /= reps;
        }
    }

    MetricSeries out;
    out.horizon = config.horizon;
    out.replications = config.replications;
    for (std::size_t p = 0; p < config.policies.size(); ++p) {
        PolicySeries s;
        s.mode = runs[p];
        s.mean_throughput = mean[p];
        s.mean_regret = compute_regret(mean[p], mean[imp_index]);
        for (const auto& rep : results) {
            double own = 0.0;
            double reference = 0.0;
            for (std::size_t t = 0; t < horizon; ++t) {
                own += rep.throughput[p][t];
                reference += rep.throughput[imp_index][t];
            }
            s.final_throughput.push_back(own);
            s.final_regret.push_back(reference - own);
            s.sizing_switch_slot.push_back(rep.switch_slot[p]);
        }
        out.policies.push_back(std::move(s));
    }
    return out;
}

} // namespace wss
