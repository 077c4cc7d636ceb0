#include "wss/sns_frontend.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "wss/error.hpp"

namespace wss {

namespace {

bool subset_full_rank(const Eigen::MatrixXd& entries, std::span<const int> columns) {
    Eigen::MatrixXd sub(entries.rows(), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t j = 0; j < columns.size(); ++j) {
        sub.col(static_cast<Eigen::Index>(j)) = entries.col(columns[j]);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sub);
    qr.setThreshold(1e-10);
    return qr.rank() == std::min(sub.rows(), sub.cols());
}

// C(n, k) saturating at `cap`.
long long binomial_capped(int n, int k, long long cap) {
    long long c = 1;
    for (int i = 1; i <= k; ++i) {
        c = c * (n - k + i) / i;
        if (c > cap) {
            return cap + 1;
        }
    }
    return c;
}

} // namespace

SensingMatrix::SensingMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
    if (entries_.rows() < 1 || entries_.cols() < entries_.rows()) {
        throw ConfigError("sensing matrix must be K x N with 1 <= K <= N");
    }
}

bool check_kruskal_rank(const Eigen::MatrixXd& entries, Rng& rng, int max_subsets) {
    const int k = static_cast<int>(entries.rows());
    const int n = static_cast<int>(entries.cols());
    if (binomial_capped(n, k, max_subsets) <= max_subsets) {
        // Enumerate all K-subsets in lexicographic order.
        std::vector<int> cols(k);
        std::iota(cols.begin(), cols.end(), 0);
        while (true) {
            if (!subset_full_rank(entries, cols)) {
                return false;
            }
            int i = k - 1;
            while (i >= 0 && cols[i] == n - k + i) {
                --i;
            }
            if (i < 0) {
                return true;
            }
            ++cols[i];
            for (int j = i + 1; j < k; ++j) {
                cols[j] = cols[j - 1] + 1;
            }
        }
    }
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    for (int s = 0; s < max_subsets; ++s) {
        std::shuffle(all.begin(), all.end(), rng);
        if (!subset_full_rank(entries, std::span<const int>(all).first(k))) {
            return false;
        }
    }
    return true;
}

SensingMatrix draw_sensing_matrix(int k_branches, int n_bands, Rng& rng) {
    if (k_branches < 1 || k_branches > n_bands) {
        throw ConfigError("sensing matrix needs 1 <= K <= N, got K=" + std::to_string(k_branches) +
                          " N=" + std::to_string(n_bands));
    }
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int attempt = 0; attempt < 2; ++attempt) {
        Eigen::MatrixXd entries(k_branches, n_bands);
        for (int c = 0; c < n_bands; ++c) {
            for (int r = 0; r < k_branches; ++r) {
                entries(r, c) = gauss(rng);
            }
        }
        if (check_kruskal_rank(entries, rng)) {
            return SensingMatrix(std::move(entries));
        }
    }
    throw NumericalError("sensing matrix draw is rank deficient after one redraw");
}

void validate_band_set(std::span<const int> selected, int n_bands) {
    std::vector<bool> seen(n_bands, false);
    for (int b : selected) {
        if (b < 0 || b >= n_bands) {
            throw UsageError("band index " + std::to_string(b) + " outside [0, " +
                             std::to_string(n_bands) + ")");
        }
        if (seen[b]) {
            throw UsageError("band index " + std::to_string(b) + " selected twice");
        }
        seen[b] = true;
    }
}

Eigen::MatrixXd select_submatrix(const SensingMatrix& matrix, std::span<const int> selected) {
    validate_band_set(selected, matrix.n_bands());
    Eigen::MatrixXd sub(matrix.k_branches(), static_cast<Eigen::Index>(selected.size()));
    for (std::size_t j = 0; j < selected.size(); ++j) {
        sub.col(static_cast<Eigen::Index>(j)) = matrix.entries().col(selected[j]);
    }
    return sub;
}

Eigen::MatrixXcd select_rows(const BandSpectra& spectra, std::span<const int> selected) {
    validate_band_set(selected, spectra.n_bands());
    Eigen::MatrixXcd rows(static_cast<Eigen::Index>(selected.size()), spectra.bins_per_band());
    for (std::size_t j = 0; j < selected.size(); ++j) {
        rows.row(static_cast<Eigen::Index>(j)) = spectra.grid.row(selected[j]);
    }
    return rows;
}

double noise_power_for_snr(double signal_power, std::optional<double> snr_db) {
    if (!snr_db) {
        return 0.0;
    }
    return signal_power * std::pow(10.0, -*snr_db / 10.0);
}

MeasurementBatch measure(const Eigen::MatrixXd& a_sub, const Eigen::MatrixXcd& selected_rows,
                         std::span<const int> selected, double noise_power, Rng& rng) {
    if (a_sub.cols() != selected_rows.rows()) {
        throw UsageError("mixing matrix has " + std::to_string(a_sub.cols()) +
                         " columns but " + std::to_string(selected_rows.rows()) +
                         " band rows were supplied");
    }
    if (static_cast<Eigen::Index>(selected.size()) != a_sub.cols()) {
        throw UsageError("selected band list does not match the mixing matrix width");
    }
    if (noise_power < 0.0) {
        throw UsageError("noise power must be nonnegative");
    }
    MeasurementBatch batch;
    batch.selected.assign(selected.begin(), selected.end());
    batch.noise_power = noise_power;
    batch.samples = a_sub.cast<std::complex<double>>() * selected_rows;
    if (noise_power > 0.0) {
        std::normal_distribution<double> gauss(0.0, std::sqrt(noise_power / 2.0));
        for (Eigen::Index f = 0; f < batch.samples.cols(); ++f) {
            for (Eigen::Index k = 0; k < batch.samples.rows(); ++k) {
                const double re = gauss(rng);
                const double im = gauss(rng);
                batch.samples(k, f) += std::complex<double>(re, im);
            }
        }
    }
    return batch;
}

} // namespace wss
