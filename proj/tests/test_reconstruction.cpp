#include <algorithm>
#include <cmath>
#include <gtest/gtest.h>
#include <numeric>
#include <optional>
#include <vector>

#include "wss/error.hpp"
#include "wss/reconstruction.hpp"
#include "wss/spectrum_model.hpp"

using namespace wss;

namespace {

constexpr int kBins = 64;

struct Scene {
    Eigen::MatrixXd a_sub;
    std::vector<Status> truth;
    MeasurementBatch batch;
};

// Random scene with exactly `busy` busy bands among `m`, unit signal power.
Scene make_scene(int k, int m, int busy, std::optional<double> snr_db, Rng& rng) {
    Scene s;
    auto a = draw_sensing_matrix(k, std::max(k, m), rng);
    std::vector<int> sel(m);
    std::iota(sel.begin(), sel.end(), 0);
    s.a_sub = select_submatrix(a, sel);
    std::vector<int> order = sel;
    std::shuffle(order.begin(), order.end(), rng);
    OccupancyState st;
    st.statuses.assign(m, kVacant);
    for (int j = 0; j < busy; ++j) {
        st.statuses[order[j]] = kBusy;
    }
    s.truth = st.statuses;
    auto spectra = synthesize_band_spectra(st, kBins, 1.0, rng);
    s.batch = measure(s.a_sub, spectra.grid, sel, noise_power_for_snr(1.0, snr_db), rng);
    return s;
}

RecoveryConfig config_for(int m, std::optional<double> snr_db, double prior = 0.7) {
    RecoveryConfig cfg;
    cfg.prior_vacancy.assign(m, prior);
    cfg.noise_variance = noise_power_for_snr(1.0, snr_db);
    return cfg;
}

std::vector<Status> support_vector(const std::vector<int>& positions, int m) {
    std::vector<Status> out(m, kVacant);
    for (int p : positions) {
        out[p] = kBusy;
    }
    return out;
}

// Direct evaluation of log p(Z | S) + log p(S) up to a support-independent constant.
double oracle_log_posterior(const Eigen::MatrixXcd& z, const Eigen::MatrixXd& a,
                            const std::vector<Status>& s, const RecoveryConfig& cfg) {
    double lp = 0.0;
    Eigen::MatrixXd cov = cfg.noise_variance * Eigen::MatrixXd::Identity(a.rows(), a.rows());
    for (int j = 0; j < a.cols(); ++j) {
        lp += std::log(s[j] ? 1.0 - cfg.prior_vacancy[j] : cfg.prior_vacancy[j]);
        if (s[j]) {
            cov += cfg.signal_variance * a.col(j) * a.col(j).transpose();
        }
    }
    const Eigen::MatrixXcd inv = cov.inverse().cast<std::complex<double>>();
    double quad = 0.0;
    for (int f = 0; f < z.cols(); ++f) {
        quad += (z.col(f).adjoint() * inv * z.col(f))(0, 0).real();
    }
    return lp - quad - z.cols() * std::log(cov.determinant());
}

} // namespace

TEST(Gamma, AllSmallSizes) {
    for (int k = 1; k <= 16; ++k) {
        for (int m = k; m <= 16; ++m) {
            const int want = m <= k ? m : k / 2;
            EXPECT_EQ(gamma_threshold(m, k), want) << "m=" << m << " k=" << k;
        }
    }
    EXPECT_EQ(gamma_threshold(7, 4), 2);
    EXPECT_EQ(gamma_threshold(4, 4), 4);
    EXPECT_EQ(gamma_threshold(5, 3), 1);
}

TEST(OracleSense, Examples) {
    const std::vector<Status> s1{0, 1, 0, 1, 0, 0, 0};
    auto r1 = oracle_sense(s1, 4);
    EXPECT_FALSE(r1.failed);
    EXPECT_EQ(r1.vacant_count(), 5);
    const std::vector<Status> s2{1, 1, 0, 1, 0, 0, 0};
    EXPECT_TRUE(oracle_sense(s2, 4).failed);
    const std::vector<Status> s3{1, 1, 1, 1};
    auto r3 = oracle_sense(s3, 4);
    EXPECT_FALSE(r3.failed);
    EXPECT_EQ(r3.vacant_count(), 0);
    EXPECT_EQ(r3.statuses, s3);
    EXPECT_THROW(oracle_sense(std::vector<Status>{}, 4), UsageError);
}

TEST(DirectSolve, NoiselessIsExact) {
    Rng rng(1);
    for (int trial = 0; trial < 20; ++trial) {
        const int m = 1 + trial % 4;
        auto s = make_scene(4, m, m, std::nullopt, rng);
        Eigen::MatrixXcd x = Eigen::MatrixXcd::Random(m, kBins);
        s.batch = measure(s.a_sub, x, s.batch.selected, 0.0, rng);
        auto back = direct_solve(s.batch, s.a_sub);
        EXPECT_LT((back - x).cwiseAbs().maxCoeff(), 1e-9);
    }
}

TEST(DirectSolve, RejectsWideAndSingular) {
    Rng rng(2);
    auto s = make_scene(3, 5, 1, 20.0, rng);
    EXPECT_THROW(direct_solve(s.batch, s.a_sub), UsageError);
    Eigen::MatrixXd singular(3, 2);
    singular << 1, 2, 2, 4, 3, 6;
    MeasurementBatch b;
    b.samples = Eigen::MatrixXcd::Zero(3, 4);
    EXPECT_THROW(direct_solve(b, singular), NumericalError);
}

TEST(SupportScore, MatchesDirectEvaluation) {
    Rng rng(3);
    auto s = make_scene(4, 6, 2, 10.0, rng);
    auto cfg = config_for(6, 10.0, 0.6);
    cfg.prior_vacancy = {0.6, 0.7, 0.8, 0.55, 0.9, 0.65};
    const std::vector<std::vector<int>> supports{{}, {0}, {2, 5}, {1, 3, 4}, {0, 1, 2, 3}};
    const auto ref = support_vector(supports[0], 6);
    const double lib0 = support_log_posterior(s.batch.samples, s.a_sub, ref, cfg);
    const double orc0 = oracle_log_posterior(s.batch.samples, s.a_sub, ref, cfg);
    for (const auto& sup : supports) {
        const auto v = support_vector(sup, 6);
        const double lib = support_log_posterior(s.batch.samples, s.a_sub, v, cfg) - lib0;
        const double orc = oracle_log_posterior(s.batch.samples, s.a_sub, v, cfg) - orc0;
        EXPECT_NEAR(lib, orc, 1e-6 * std::max(1.0, std::abs(orc)));
    }
}

TEST(SupportScore, AddingTrueBusyBandRaisesScore) {
    Rng rng(4);
    int checked = 0;
    for (int trial = 0; trial < 50; ++trial) {
        auto s = make_scene(4, 6, 2, 20.0, rng);
        auto cfg = config_for(6, 20.0);
        std::vector<int> busy;
        for (int j = 0; j < 6; ++j) {
            if (s.truth[j]) {
                busy.push_back(j);
            }
        }
        const double one = support_log_posterior(s.batch.samples, s.a_sub, support_vector({busy[0]}, 6), cfg);
        const double both = support_log_posterior(s.batch.samples, s.a_sub, support_vector(busy, 6), cfg);
        EXPECT_GT(both, one);
        ++checked;
    }
    EXPECT_EQ(checked, 50);
}

TEST(Fbmp, ZeroMeasurementGivesEmptySupport) {
    Rng rng(5);
    auto s = make_scene(4, 7, 0, 20.0, rng);
    s.batch.samples.setZero();
    auto r = fbmp_recover(s.batch, s.a_sub, config_for(7, 20.0), 2);
    EXPECT_TRUE(r.support.empty());
    EXPECT_EQ(r.residual_ratio, 0.0);
    EXPECT_EQ(r.spectra.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Fbmp, RecoversSparseSupportAt20dB) {
    Rng rng(6);
    const int trials = 400;
    int exact = 0;
    for (int t = 0; t < trials; ++t) {
        const int busy = t % 3;
        auto s = make_scene(4, 6, busy, 20.0, rng);
        auto r = fbmp_recover(s.batch, s.a_sub, config_for(6, 20.0), gamma_threshold(6, 4));
        exact += support_vector(r.support, 6) == s.truth;
    }
    EXPECT_GE(exact, static_cast<int>(0.95 * trials));
}

TEST(Fbmp, AgreesWithExhaustiveMap) {
    Rng rng(7);
    const int trials = 300;
    int agree = 0;
    for (int t = 0; t < trials; ++t) {
        const int m = 5 + t % 3;
        auto s = make_scene(4, m, t % 3, 5.0 + (t % 4) * 5.0, rng);
        auto cfg = config_for(m, 5.0 + (t % 4) * 5.0, 0.75);
        cfg.search_breadth = 4;
        const int gamma = gamma_threshold(m, 4);
        auto r = fbmp_recover(s.batch, s.a_sub, cfg, gamma);
        double best = -INFINITY;
        std::vector<Status> arg;
        for (unsigned mask = 0; mask < (1U << m); ++mask) {
            if (std::popcount(mask) > gamma) {
                continue;
            }
            std::vector<Status> v(m);
            for (int j = 0; j < m; ++j) {
                v[j] = (mask >> j) & 1U;
            }
            const double sc = oracle_log_posterior(s.batch.samples, s.a_sub, v, cfg);
            if (sc > best) {
                best = sc;
                arg = v;
            }
        }
        agree += support_vector(r.support, m) == arg;
    }
    EXPECT_GE(agree, static_cast<int>(0.99 * trials));
}

TEST(Fbmp, SupportNeverExceedsCap) {
    Rng rng(8);
    for (int t = 0; t < 50; ++t) {
        auto s = make_scene(4, 8, 4, 20.0, rng);
        auto r = fbmp_recover(s.batch, s.a_sub, config_for(8, 20.0), 2);
        EXPECT_LE(r.support.size(), 2U);
        EXPECT_TRUE(std::is_sorted(r.support.begin(), r.support.end()));
    }
}

TEST(EnergyDetector, ThresholdIsChiSquaredQuantile) {
    // chi^2_2 upper 5% point is -2 ln 0.05.
    EXPECT_NEAR(energy_threshold(2.0, 1, 0.05), -2.0 * std::log(0.05), 1e-9);
    EXPECT_EQ(energy_threshold(0.0, 64, 0.05), 0.0);
}

TEST(EnergyDetector, FalseAlarmRateOnNoise) {
    Rng rng(9);
    std::normal_distribution<double> g(0.0, std::sqrt(0.5));
    const int bands = 20000;
    Eigen::MatrixXcd noise(bands, kBins);
    for (int i = 0; i < bands; ++i) {
        for (int f = 0; f < kBins; ++f) {
            noise(i, f) = {g(rng), g(rng)};
        }
    }
    const std::vector<double> var(bands, 1.0);
    for (double fa : {0.01, 0.05, 0.1}) {
        auto s = energy_detect(noise, var, fa);
        const double rate = std::count(s.begin(), s.end(), kBusy) / static_cast<double>(bands);
        EXPECT_NEAR(rate, fa, 0.01);
    }
}

TEST(EnergyDetector, RejectsBadArguments) {
    Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(2, 4);
    EXPECT_THROW(energy_detect(x, std::vector<double>{1.0}, 0.05), UsageError);
    EXPECT_THROW(energy_detect(x, std::vector<double>{1.0, 1.0}, 0.0), UsageError);
}

TEST(SignalSense, NoiselessSquareSet) {
    Rng rng(10);
    for (int t = 0; t < 20; ++t) {
        auto s = make_scene(4, 4, t % 5, std::nullopt, rng);
        auto r = signal_sense(s.batch, s.a_sub, config_for(4, std::nullopt), 4);
        EXPECT_FALSE(r.failed);
        EXPECT_EQ(r.statuses, s.truth);
    }
}

TEST(SignalSense, NoiselessSparseWideSet) {
    Rng rng(13);
    for (int t = 0; t < 20; ++t) {
        auto s = make_scene(4, 7, t % 3, std::nullopt, rng);
        auto r = signal_sense(s.batch, s.a_sub, config_for(7, std::nullopt), 4);
        EXPECT_FALSE(r.failed);
        EXPECT_EQ(r.statuses, s.truth);
    }
}

TEST(SignalSense, TooManyBusyBandsFails) {
    Rng rng(11);
    int failed = 0;
    for (int t = 0; t < 100; ++t) {
        auto s = make_scene(4, 7, 4, 20.0, rng);
        failed += signal_sense(s.batch, s.a_sub, config_for(7, 20.0), 4).failed;
    }
    EXPECT_GE(failed, 95);
}

TEST(SignalSense, SparseSceneSucceeds) {
    Rng rng(12);
    int ok = 0;
    for (int t = 0; t < 100; ++t) {
        auto s = make_scene(4, 7, t % 3, 20.0, rng);
        auto r = signal_sense(s.batch, s.a_sub, config_for(7, 20.0), 4);
        ok += !r.failed && r.statuses == s.truth;
    }
    EXPECT_GE(ok, 90);
}
