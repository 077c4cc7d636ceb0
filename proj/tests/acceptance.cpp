// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero when any criterion fails.
#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "wss/config.hpp"
#include "wss/experiment.hpp"
#include "wss/reconstruction.hpp"
#include "wss/results_io.hpp"
#include "wss/selection_optimizer.hpp"

using namespace wss;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Verdict {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Verdict()>& check) {
    const auto start = Clock::now();
    Verdict v;
    try {
        v = check();
    } catch (const std::exception& e) {
        v = {false, std::string("exception: ") + e.what()};
    }
    failures += v.pass ? 0 : 1;
    std::printf("%s  C%d %s: %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", id, title.c_str(),
                v.detail.c_str(), seconds_since(start));
    std::fflush(stdout);
}

std::string fmt(double x, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

std::vector<double> brute_pmf(const std::vector<double>& busy) {
    const int m = static_cast<int>(busy.size());
    std::vector<double> pmf(m + 1, 0.0);
    for (unsigned mask = 0; mask < (1U << m); ++mask) {
        double p = 1.0;
        for (int j = 0; j < m; ++j) {
            p *= (mask >> j & 1U) ? busy[j] : 1.0 - busy[j];
        }
        pmf[std::popcount(mask)] += p;
    }
    return pmf;
}

double brute_objective(const std::vector<double>& p0, int k) {
    std::vector<double> busy;
    double sum = 0.0;
    for (double p : p0) {
        busy.push_back(1.0 - p);
        sum += p;
    }
    if (static_cast<int>(p0.size()) <= k) {
        return sum;
    }
    const auto pmf = brute_pmf(busy);
    double success = 0.0;
    for (int i = 0; i <= k / 2; ++i) {
        success += pmf[i];
    }
    return success * sum;
}

// Mean-regret slope over slots [from, to).
double regret_slope(const std::vector<double>& regret, std::int64_t from, std::int64_t to) {
    const double start = from == 0 ? 0.0 : regret[static_cast<std::size_t>(from - 1)];
    return (regret[static_cast<std::size_t>(to - 1)] - start) / static_cast<double>(to - from);
}

double mean_over(const std::vector<double>& v, std::int64_t from, std::int64_t to) {
    return std::accumulate(v.begin() + from, v.begin() + to, 0.0) / static_cast<double>(to - from);
}

ExperimentConfig case1_config() {
    ExperimentConfig c;
    c.name = "acceptance";
    c.case_name = "case1";
    c.n_bands = 8;
    c.k_branches = 4;
    c.horizon = 10000;
    c.replications = 100;
    c.seed = 1;
    c.rs_mode = RsMode::Oracle;
    c.policies = {PolicyMode::LDM, PolicyMode::OLDM, PolicyMode::IMP};
    return c;
}

std::string csv_of(const MetricSeries& s) {
    std::ostringstream out;
    write_series_csv(s, out);
    return out.str();
}

} // namespace

int main() {
    report(1, "optimal set size", [] {
        const auto p1 = case_stationary_vacancy("case1");
        const auto p2 = case_stationary_vacancy("case2");
        const auto start = Clock::now();
        const int m1 = optimize_size(p1, 4).size;
        const int m2 = optimize_size(p2, 4).size;
        const double elapsed = seconds_since(start);
        return Verdict{m1 == 7 && m2 == 5 && elapsed < 1e-3,
                       "case1 M=" + std::to_string(m1) + ", case2 M=" + std::to_string(m2) +
                           ", " + fmt(elapsed * 1e6, 3) + " us"};
    });

    report(2, "Poisson-binomial vs enumeration", [] {
        Rng rng(derive_seed(2, 0));
        std::uniform_int_distribution<int> len(1, 12);
        double worst = 0.0;
        const auto start = Clock::now();
        for (int trial = 0; trial < 1000; ++trial) {
            std::vector<double> busy(static_cast<std::size_t>(len(rng)));
            for (double& b : busy) {
                b = uniform01(rng);
            }
            const auto want = brute_pmf(busy);
            const auto got = poisson_binomial_pmf(busy, static_cast<int>(busy.size()));
            for (std::size_t i = 0; i < want.size(); ++i) {
                worst = std::max(worst, std::abs(got[i] - want[i]));
            }
        }
        const double elapsed = seconds_since(start);
        return Verdict{worst <= 1e-12 && elapsed < 10.0, "max abs error " + fmt(worst, 3)};
    });

    report(3, "prefix-set dominance", [] {
        Rng rng(derive_seed(3, 0));
        int agree = 0;
        const auto start = Clock::now();
        for (int trial = 0; trial < 200; ++trial) {
            const int n = std::uniform_int_distribution<int>(2, 10)(rng);
            const int k = std::uniform_int_distribution<int>(1, n)(rng);
            std::vector<double> p0(static_cast<std::size_t>(n));
            for (double& p : p0) {
                p = uniform01(rng);
            }
            double best = -1.0;
            unsigned best_mask = 0;
            for (unsigned mask = 1; mask < (1U << n); ++mask) {
                std::vector<double> sub;
                for (int j = 0; j < n; ++j) {
                    if (mask >> j & 1U) {
                        sub.push_back(p0[static_cast<std::size_t>(j)]);
                    }
                }
                const double v = brute_objective(sub, k);
                if (v > best) {
                    best = v;
                    best_mask = mask;
                }
            }
            const auto d = optimize_size(p0, k);
            const auto order = rank_by_vacancy(p0);
            unsigned prefix_mask = 0;
            for (int j = 0; j < d.size; ++j) {
                prefix_mask |= 1U << order[static_cast<std::size_t>(j)];
            }
            agree += prefix_mask == best_mask && std::abs(d.objective_value - best) <= 1e-12;
        }
        const double elapsed = seconds_since(start);
        return Verdict{agree == 200 && elapsed < 30.0, std::to_string(agree) + "/200 agree"};
    });

    // Criteria 4 and 5 share one run.
    const auto start45 = Clock::now();
    const MetricSeries main_run = run_experiment(case1_config());
    const double main_seconds = seconds_since(start45);

    report(4, "OLDM converges to IMP", [&] {
        const auto& oldm = main_run.at(PolicyMode::OLDM);
        const auto& imp = main_run.at(PolicyMode::IMP);
        const double tail_oldm = mean_over(oldm.mean_throughput, 8000, 10000);
        const double tail_imp = mean_over(imp.mean_throughput, 8000, 10000);
        const double gap = std::abs(tail_imp - tail_oldm) / tail_imp;
        const double early = regret_slope(oldm.mean_regret, 0, 3000);
        const double late = regret_slope(oldm.mean_regret, 5000, 10000);
        const double ratio = late / early;
        return Verdict{gap < 0.05 && ratio < 0.1 && main_seconds < 120.0,
                       "tail throughput gap " + fmt(100 * gap, 3) + "% (< 5%), slope ratio " +
                           fmt(ratio, 3) + " (< 0.1), run " + fmt(main_seconds, 3) + " s"};
    });

    report(5, "OLDM beats LDM", [&] {
        const double ldm = main_run.at(PolicyMode::LDM).mean_regret.back();
        const double oldm = main_run.at(PolicyMode::OLDM).mean_regret.back();
        return Verdict{oldm < ldm, "final regret OLDM " + fmt(oldm, 6) + " < LDM " + fmt(ldm, 6)};
    });

    report(6, "regret monotone in K and N", [] {
        auto final_regret = [](int n, int k) {
            auto c = case1_config();
            c.n_bands = n;
            c.k_branches = k;
            c.policies = {PolicyMode::OLDM, PolicyMode::IMP};
            return run_experiment(c).at(PolicyMode::OLDM).mean_regret.back();
        };
        const double k3 = final_regret(8, 3);
        const double k4 = final_regret(8, 4);
        const double k5 = final_regret(8, 5);
        const double n12 = final_regret(12, 4);
        const double n16 = final_regret(16, 4);
        const bool ok = k3 > k4 && k4 > k5 && k4 < n12 && n12 < n16;
        return Verdict{ok, "K=3,4,5: " + fmt(k3, 6) + " > " + fmt(k4, 6) + " > " + fmt(k5, 6) +
                               "; N=8,12,16: " + fmt(k4, 6) + " < " + fmt(n12, 6) + " < " +
                               fmt(n16, 6)};
    });

    report(7, "exploration threshold accuracy", [] {
        const double mu = 0.1;
        const double delta = 0.1;
        const auto threshold = exploration_threshold(8, 4, mu, delta);
        auto c = case1_config();
        c.horizon = threshold.slots;
        c.mu = mu;
        c.delta = delta;
        // An exploration coefficient this large makes every block an
        // exploration block, so each band collects exactly one transition
        // per block and Q after W slots.
        c.exploration_coefficient = 1e18;
        const auto stats = resolve_statistics(c);
        const auto truth = stationary_vacancy(stats);
        const int reps = 500;
        int correct = 0;
        bool exact_count = true;
        const auto start = Clock::now();
        for (int r = 0; r < reps; ++r) {
            const auto seed = derive_seed(c.seed, static_cast<std::uint64_t>(r));
            ReplicationEnvironment env(c, stats, seed);
            OracleSensor sensor(env, c.k_branches);
            Rng rng(derive_seed(seed, Stream::Policy));
            const auto run = run_policy(policy_config_for(c, PolicyMode::LDM, stats), sensor, rng);
            for (auto n : run.final_belief.obs_count) {
                exact_count = exact_count && n == threshold.observations;
            }
            correct += mu_correct(run.final_belief.stationary_estimate(), truth, mu);
        }
        const double frac = static_cast<double>(correct) / reps;
        const double need = 1.0 - delta - 0.05;
        return Verdict{exact_count && frac >= need && seconds_since(start) < 120.0,
                       "Q=" + std::to_string(threshold.observations) + ", mu-correct fraction " +
                           fmt(frac, 4) + " (>= " + fmt(need, 3) + ")"};
    });

    report(8, "signal chain fidelity", [] {
        Rng rng(derive_seed(8, 0));
        double worst = 0.0;
        for (int trial = 0; trial < 200; ++trial) {
            const int m = 1 + trial % 4;
            const auto a = draw_sensing_matrix(4, 8, rng);
            std::vector<int> sel(static_cast<std::size_t>(m));
            std::iota(sel.begin(), sel.end(), 2 * (trial % 3));
            const Eigen::MatrixXd sub = select_submatrix(a, sel);
            const Eigen::MatrixXcd x = Eigen::MatrixXcd::Random(m, 64);
            const auto batch = measure(sub, x, sel, 0.0, rng);
            worst = std::max(worst, (direct_solve(batch, sub) - x).cwiseAbs().maxCoeff());
        }

        const auto p0 = case_stationary_vacancy("case1");
        const std::vector<double> prior(p0.begin(), p0.begin() + 6);
        const auto stats = BandStatistics::from_stationary(prior, 0.5);
        std::vector<int> sel(6);
        std::iota(sel.begin(), sel.end(), 0);
        RecoveryConfig cfg;
        cfg.prior_vacancy = prior;
        cfg.noise_variance = noise_power_for_snr(1.0, 20.0);
        const int slots = 1000;
        int agree = 0;
        for (int t = 0; t < slots; ++t) {
            Rng slot_rng(derive_seed(8, Stream::SlotSignal, static_cast<std::uint64_t>(t)));
            const auto a = draw_sensing_matrix(4, 6, slot_rng);
            const Eigen::MatrixXd sub = select_submatrix(a, sel);
            const auto state = init_occupancy(stats, slot_rng);
            const auto spectra = synthesize_band_spectra(state, 64, 1.0, slot_rng);
            const auto batch = measure(sub, spectra.grid, sel, cfg.noise_variance, slot_rng);
            const bool predicted = signal_sense(batch, sub, cfg, 4).failed;
            agree += predicted == oracle_sense(state.statuses, 4).failed;
        }
        const double frac = static_cast<double>(agree) / slots;
        return Verdict{worst <= 1e-9 && frac >= 0.95,
                       "direct solve max error " + fmt(worst, 3) + ", xi agreement " + fmt(frac, 4) +
                           " (>= 0.95)"};
    });

    report(9, "determinism", [] {
        auto c = case1_config();
        c.horizon = 2000;
        c.replications = 20;
        c.rs_mode = RsMode::Signal;
        c.snr_db = 20.0;
        c.bins_per_band = 16;
        const auto first = csv_of(run_experiment(c));
        const auto second = csv_of(run_experiment(c));
        auto oracle = case1_config();
        oracle.horizon = 3000;
        oracle.replications = 20;
        const bool oracle_same = csv_of(run_experiment(oracle)) == csv_of(run_experiment(oracle));
        return Verdict{first == second && oracle_same,
                       "signal and oracle reruns byte-identical (" + std::to_string(first.size()) +
                           " bytes)"};
    });

    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
