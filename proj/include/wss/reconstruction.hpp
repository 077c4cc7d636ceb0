#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "wss/sns_frontend.hpp"
#include "wss/spectrum_model.hpp"

namespace wss {

/// Largest busy count a set of `selected_count` bands tolerates with K
/// branches: the whole set when it fits in K, otherwise floor(K / 2).
int gamma_threshold(int selected_count, int k_branches);

/// Outcome of sensing one selected band set.
struct SenseResult {
    std::vector<Status> statuses; ///< over the selected bands, in selection order
    bool failed = false;          ///< reconstruction failure flag (xi)
    double residual_ratio = 0.0;  ///< ||Z - A X_hat|| / ||Z||, signal mode only

    int busy_count() const;
    int vacant_count() const;
};

struct RecoveryConfig {
    std::vector<double> prior_vacancy; ///< per selected band, selection order
    double signal_variance = 1.0;
    double noise_variance = 0.0;       ///< 0 means noiseless
    int search_breadth = 5;            ///< D, candidates kept per support size
    double energy_fa_rate = 0.05;
    double residual_threshold = 0.1;
    /// Tail probability for the check that the residual is explained by noise.
    double residual_fa_rate = 1e-3;
};

/// Applies the sparsity criterion to ground truth; statuses are exact.
SenseResult oracle_sense(std::span<const Status> true_statuses, int k_branches);

/// Per-bin least squares for |A_N| <= K. Throws NumericalError when the
/// sub-matrix is rank deficient.
Eigen::MatrixXcd direct_solve(const MeasurementBatch& batch, const Eigen::MatrixXd& a_sub);

struct FbmpResult {
    std::vector<int> support; ///< positions within the selected set, ascending
    Eigen::MatrixXcd spectra; ///< conditional mean, zero outside the support
    double residual_ratio = 0.0;
    double log_posterior = 0.0;
};

/// Unnormalized log posterior of a support (0/1 per selected band) under the
/// Gaussian signal/noise model: log prior of the activity pattern plus the
/// log likelihood of all bins, dropping support-independent constants.
double support_log_posterior(const Eigen::MatrixXcd& samples, const Eigen::MatrixXd& a_sub,
                             std::span<const Status> support, const RecoveryConfig& cfg);

/// Greedy MAP support search (fast Bayesian matching pursuit). Supports grow
/// one band at a time, the `search_breadth` best of each size are expanded,
/// and growth stops at `max_support`.
FbmpResult fbmp_recover(const MeasurementBatch& batch, const Eigen::MatrixXd& a_sub,
                        const RecoveryConfig& cfg, int max_support);

/// Energy threshold for a band with per-bin noise variance `noise_variance`:
/// the (1 - fa_rate) quantile of (noise_variance / 2) * chi^2 with 2F dof.
double energy_threshold(double noise_variance, int bins, double fa_rate);

/// A band is busy iff its energy exceeds the noise-only quantile.
std::vector<Status> energy_detect(const Eigen::MatrixXcd& spectra,
                                  std::span<const double> noise_variance, double fa_rate);

/// Recover, detect and declare failure. Uses direct_solve when |A_N| <= K and
/// fbmp_recover (support capped at gamma) otherwise.
SenseResult signal_sense(const MeasurementBatch& batch, const Eigen::MatrixXd& a_sub,
                         const RecoveryConfig& cfg, int k_branches);

} // namespace wss
