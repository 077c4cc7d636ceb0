#include "wss/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <unordered_set>

#include <boost/math/distributions/chi_squared.hpp>

#include "wss/error.hpp"

namespace wss {

namespace {

using Complex = std::complex<double>;

// Variance floor standing in for "no noise" so the likelihood stays proper.
double effective_noise(const RecoveryConfig& cfg) {
    if (cfg.noise_variance > 0.0) {
        return cfg.noise_variance;
    }
    return std::max(cfg.signal_variance, 1.0) * 1e-12;
}

double chi_squared_upper_quantile(double dof, double tail) {
    boost::math::chi_squared dist(dof);
    return boost::math::quantile(boost::math::complement(dist, tail));
}

Eigen::MatrixXd columns_of(const Eigen::MatrixXd& a, std::span<const int> cols) {
    Eigen::MatrixXd out(a.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) {
        out.col(static_cast<Eigen::Index>(j)) = a.col(cols[j]);
    }
    return out;
}

// sigma^2 * diag((A^T A)^-1): per-band noise variance of a least-squares fit.
std::vector<double> ls_noise_variance(const Eigen::MatrixXd& a, double sigma2) {
    const Eigen::MatrixXd gram_inv =
        (a.transpose() * a).ldlt().solve(Eigen::MatrixXd::Identity(a.cols(), a.cols()));
    std::vector<double> out(static_cast<std::size_t>(a.cols()));
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        out[static_cast<std::size_t>(j)] = sigma2 * gram_inv(j, j);
    }
    return out;
}

double log_clamped(double p) {
    return std::log(std::clamp(p, 1e-12, 1.0 - 1e-12));
}

std::vector<int> mask_to_positions(std::uint64_t mask, int width) {
    std::vector<int> out;
    for (int j = 0; j < width; ++j) {
        if (mask >> j & 1U) {
            out.push_back(j);
        }
    }
    return out;
}

std::vector<Status> mask_to_support(std::uint64_t mask, int width) {
    std::vector<Status> out(width, kVacant);
    for (int j = 0; j < width; ++j) {
        out[j] = (mask >> j & 1U) ? kBusy : kVacant;
    }
    return out;
}

} // namespace

int gamma_threshold(int selected_count, int k_branches) {
    return selected_count <= k_branches ? selected_count : k_branches / 2;
}

int SenseResult::busy_count() const {
    return static_cast<int>(std::count(statuses.begin(), statuses.end(), kBusy));
}

int SenseResult::vacant_count() const {
    return static_cast<int>(statuses.size()) - busy_count();
}

SenseResult oracle_sense(std::span<const Status> true_statuses, int k_branches) {
    if (true_statuses.empty()) {
        throw UsageError("oracle_sense needs at least one selected band");
    }
    SenseResult out;
    out.statuses.assign(true_statuses.begin(), true_statuses.end());
    out.failed = out.busy_count() > gamma_threshold(static_cast<int>(true_statuses.size()), k_branches);
    return out;
}

Eigen::MatrixXcd direct_solve(const MeasurementBatch& batch, const Eigen::MatrixXd& a_sub) {
    if (a_sub.cols() > a_sub.rows()) {
        throw UsageError("direct_solve needs |A_N| <= K");
    }
    if (a_sub.rows() != batch.samples.rows()) {
        throw UsageError("measurement rows do not match the number of branches");
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a_sub);
    qr.setThreshold(1e-10);
    if (qr.rank() < a_sub.cols()) {
        throw NumericalError("selected mixing sub-matrix is rank deficient");
    }
    const Eigen::MatrixXcd ac = a_sub.cast<Complex>();
    return ac.colPivHouseholderQr().solve(batch.samples);
}

double support_log_posterior(const Eigen::MatrixXcd& samples, const Eigen::MatrixXd& a_sub,
                             std::span<const Status> support, const RecoveryConfig& cfg) {
    const auto m = static_cast<std::size_t>(a_sub.cols());
    if (support.size() != m || cfg.prior_vacancy.size() != m) {
        throw UsageError("support and prior lengths must equal the number of selected bands");
    }
    double log_prior = 0.0;
    std::vector<int> active;
    for (std::size_t j = 0; j < m; ++j) {
        if (support[j] == kBusy) {
            log_prior += log_clamped(1.0 - cfg.prior_vacancy[j]);
            active.push_back(static_cast<int>(j));
        } else {
            log_prior += log_clamped(cfg.prior_vacancy[j]);
        }
    }
    const double sigma2 = effective_noise(cfg);
    const Eigen::MatrixXd a_s = columns_of(a_sub, active);
    const Eigen::Index k = a_sub.rows();
    Eigen::MatrixXd cov = sigma2 * Eigen::MatrixXd::Identity(k, k);
    if (!active.empty()) {
        cov += cfg.signal_variance * a_s * a_s.transpose();
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(cov);
    const Eigen::MatrixXd l = llt.matrixL();
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
        log_det += 2.0 * std::log(l(i, i));
    }
    // sum_f z_f^H cov^-1 z_f via whitening.
    const Eigen::MatrixXcd whitened = l.cast<Complex>().triangularView<Eigen::Lower>().solve(samples);
    const double quad = whitened.squaredNorm();
    const auto bins = static_cast<double>(samples.cols());
    return log_prior - quad - bins * log_det;
}

FbmpResult fbmp_recover(const MeasurementBatch& batch, const Eigen::MatrixXd& a_sub,
                        const RecoveryConfig& cfg, int max_support) {
    const int m = static_cast<int>(a_sub.cols());
    if (m > 64) {
        throw UsageError("fbmp_recover supports at most 64 selected bands");
    }
    if (a_sub.rows() != batch.samples.rows()) {
        throw UsageError("measurement rows do not match the number of branches");
    }
    const int breadth = std::max(cfg.search_breadth, 1);
    max_support = std::clamp(max_support, 0, m);

    struct Candidate {
        std::uint64_t mask;
        double score;
    };
    auto score_of = [&](std::uint64_t mask) {
        return support_log_posterior(batch.samples, a_sub, mask_to_support(mask, m), cfg);
    };
    auto better = [](const Candidate& a, const Candidate& b) {
        return a.score != b.score ? a.score > b.score : a.mask < b.mask;
    };

    Candidate best{0, score_of(0)};
    std::vector<Candidate> frontier{best};
    for (int size = 1; size <= max_support; ++size) {
        std::vector<Candidate> next;
        std::unordered_set<std::uint64_t> seen;
        for (const auto& parent : frontier) {
            for (int j = 0; j < m; ++j) {
                const std::uint64_t bit = std::uint64_t{1} << j;
                if (parent.mask & bit) {
                    continue;
                }
                const std::uint64_t child = parent.mask | bit;
                if (!seen.insert(child).second) {
                    continue;
                }
                next.push_back({child, score_of(child)});
            }
        }
        if (next.empty()) {
            break;
        }
        std::sort(next.begin(), next.end(), better);
        if (static_cast<int>(next.size()) > breadth) {
            next.resize(static_cast<std::size_t>(breadth));
        }
        if (better(next.front(), best)) {
            best = next.front();
        }
        frontier = std::move(next);
    }

    FbmpResult out;
    out.support = mask_to_positions(best.mask, m);
    out.log_posterior = best.score;
    out.spectra = Eigen::MatrixXcd::Zero(m, batch.samples.cols());
    Eigen::MatrixXcd fitted = Eigen::MatrixXcd::Zero(batch.samples.rows(), batch.samples.cols());
    if (!out.support.empty()) {
        const double sigma2 = effective_noise(cfg);
        const Eigen::MatrixXd a_s = columns_of(a_sub, out.support);
        const Eigen::Index k = a_sub.rows();
        const Eigen::MatrixXd cov =
            sigma2 * Eigen::MatrixXd::Identity(k, k) + cfg.signal_variance * a_s * a_s.transpose();
        const Eigen::MatrixXcd gain =
            (cfg.signal_variance * a_s.transpose() * cov.ldlt().solve(Eigen::MatrixXd::Identity(k, k)))
                .cast<Complex>();
        const Eigen::MatrixXcd x_s = gain * batch.samples;
        for (std::size_t j = 0; j < out.support.size(); ++j) {
            out.spectra.row(out.support[j]) = x_s.row(static_cast<Eigen::Index>(j));
        }
        fitted = a_s.cast<Complex>() * x_s;
    }
    const double z_norm = batch.samples.norm();
    out.residual_ratio = z_norm > 0.0 ? (batch.samples - fitted).norm() / z_norm : 0.0;
    return out;
}

double energy_threshold(double noise_variance, int bins, double fa_rate) {
    if (noise_variance <= 0.0) {
        return 0.0;
    }
    return 0.5 * noise_variance * chi_squared_upper_quantile(2.0 * bins, fa_rate);
}

std::vector<Status> energy_detect(const Eigen::MatrixXcd& spectra,
                                  std::span<const double> noise_variance, double fa_rate) {
    if (static_cast<Eigen::Index>(noise_variance.size()) != spectra.rows()) {
        throw UsageError("one noise variance per recovered band is required");
    }
    if (!(fa_rate > 0.0 && fa_rate < 1.0)) {
        throw UsageError("energy false-alarm rate must lie in (0, 1)");
    }
    const int bins = static_cast<int>(spectra.cols());
    std::vector<Status> out(static_cast<std::size_t>(spectra.rows()), kVacant);
    for (Eigen::Index n = 0; n < spectra.rows(); ++n) {
        const double energy = spectra.row(n).squaredNorm();
        const double threshold = energy_threshold(noise_variance[static_cast<std::size_t>(n)], bins, fa_rate);
        out[static_cast<std::size_t>(n)] = energy > threshold ? kBusy : kVacant;
    }
    return out;
}

SenseResult signal_sense(const MeasurementBatch& batch, const Eigen::MatrixXd& a_sub,
                         const RecoveryConfig& cfg, int k_branches) {
    const int m = static_cast<int>(a_sub.cols());
    if (m < 1) {
        throw UsageError("signal_sense needs at least one selected band");
    }
    const int gamma = gamma_threshold(m, k_branches);
    const double sigma2 = effective_noise(cfg);

    Eigen::MatrixXcd spectra;
    std::vector<double> band_noise(static_cast<std::size_t>(m), sigma2);
    int fitted_columns = 0;
    double residual_ratio = 0.0;
    if (m <= k_branches) {
        spectra = direct_solve(batch, a_sub);
        band_noise = ls_noise_variance(a_sub, sigma2);
        fitted_columns = m;
        const double z_norm = batch.samples.norm();
        residual_ratio = z_norm > 0.0
            ? (batch.samples - a_sub.cast<Complex>() * spectra).norm() / z_norm
            : 0.0;
    } else {
        const FbmpResult fbmp = fbmp_recover(batch, a_sub, cfg, gamma);
        spectra = fbmp.spectra;
        residual_ratio = fbmp.residual_ratio;
        fitted_columns = static_cast<int>(fbmp.support.size());
        if (!fbmp.support.empty()) {
            const auto support_noise = ls_noise_variance(columns_of(a_sub, fbmp.support), sigma2);
            for (std::size_t j = 0; j < fbmp.support.size(); ++j) {
                band_noise[static_cast<std::size_t>(fbmp.support[j])] = support_noise[j];
            }
        }
    }

    SenseResult out;
    out.statuses = energy_detect(spectra, band_noise, cfg.energy_fa_rate);
    out.residual_ratio = residual_ratio;

    // A large relative residual only signals failure when noise cannot account
    // for it: pure-noise measurements have a residual ratio near 1.
    bool residual_unexplained = false;
    if (residual_ratio > cfg.residual_threshold) {
        const int free_dims = k_branches - fitted_columns;
        const double residual_energy = residual_ratio * residual_ratio * batch.samples.squaredNorm();
        if (free_dims <= 0) {
            residual_unexplained = true;
        } else {
            const double dof = 2.0 * free_dims * static_cast<double>(batch.samples.cols());
            residual_unexplained =
                residual_energy > 0.5 * sigma2 * chi_squared_upper_quantile(dof, cfg.residual_fa_rate);
        }
    }
    out.failed = out.busy_count() > gamma || residual_unexplained;
    return out;
}

} // namespace wss
