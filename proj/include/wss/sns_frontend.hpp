#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "wss/random.hpp"
#include "wss/spectrum_model.hpp"

namespace wss {

// Band indices are zero-based everywhere in the library.
using BandSet = std::vector<int>;

/// K x N master matrix of real mixing coefficients, one column per band.
class SensingMatrix {
public:
    explicit SensingMatrix(Eigen::MatrixXd entries);

    int k_branches() const { return static_cast<int>(entries_.rows()); }
    int n_bands() const { return static_cast<int>(entries_.cols()); }
    const Eigen::MatrixXd& entries() const { return entries_; }

private:
    Eigen::MatrixXd entries_;
};

/// Samples of all K branches, one column per frequency bin.
struct MeasurementBatch {
    Eigen::MatrixXcd samples;
    BandSet selected;
    double noise_power = 0.0;
};

/// Draws i.i.d. standard Gaussian entries and verifies that every K-column
/// subset (or a random sample of 256 subsets when there are more) has
/// numerical rank K. A failing draw is redrawn once before giving up.
SensingMatrix draw_sensing_matrix(int k_branches, int n_bands, Rng& rng);

/// True when every K-column subset checked has full rank.
bool check_kruskal_rank(const Eigen::MatrixXd& entries, Rng& rng, int max_subsets = 256);

/// Throws UsageError on duplicate or out-of-range indices.
void validate_band_set(std::span<const int> selected, int n_bands);

/// Columns of the master matrix at `selected`, in that order.
Eigen::MatrixXd select_submatrix(const SensingMatrix& matrix, std::span<const int> selected);

/// Rows of `spectra` at `selected`, in that order.
Eigen::MatrixXcd select_rows(const BandSpectra& spectra, std::span<const int> selected);

/// Per-branch noise power giving each unit-gain busy band the requested SNR.
/// An empty SNR means noiseless sensing.
double noise_power_for_snr(double signal_power, std::optional<double> snr_db);

/// Z = A_sub * X + W bin-wise, W circular complex Gaussian with variance
/// `noise_power` per entry (no noise drawn when noise_power == 0).
MeasurementBatch measure(const Eigen::MatrixXd& a_sub, const Eigen::MatrixXcd& selected_rows,
                         std::span<const int> selected, double noise_power, Rng& rng);

} // namespace wss
