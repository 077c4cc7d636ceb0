#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "wss/random.hpp"

namespace wss {

// Band status convention used throughout: 0 = vacant, 1 = busy.
using Status = std::uint8_t;
inline constexpr Status kVacant = 0;
inline constexpr Status kBusy = 1;

/// Ground-truth two-state Markov statistics of every band.
///
/// p01[n] is P(busy at t | vacant at t-1) and p10[n] is P(vacant at t | busy
/// at t-1). Chains with p01 + p10 == 0 have no stationary distribution and
/// are rejected.
class BandStatistics {
public:
    BandStatistics(std::vector<double> p01, std::vector<double> p10);

    /// Build transition pairs from stationary vacancy probabilities:
    /// p10 = lambda * p0, p01 = lambda * (1 - p0), lambda in (0, 1].
    static BandStatistics from_stationary(std::span<const double> p0, double lambda);

    int n_bands() const { return static_cast<int>(p01_.size()); }
    double p01(int band) const { return p01_.at(band); }
    double p10(int band) const { return p10_.at(band); }
    double p00(int band) const { return 1.0 - p01_.at(band); }
    double p11(int band) const { return 1.0 - p10_.at(band); }
    std::span<const double> p01() const { return p01_; }
    std::span<const double> p10() const { return p10_; }

private:
    std::vector<double> p01_;
    std::vector<double> p10_;
};

struct OccupancyState {
    std::vector<Status> statuses;
    std::int64_t slot_index = 0;

    int n_bands() const { return static_cast<int>(statuses.size()); }
    bool busy(int band) const { return statuses.at(band) == kBusy; }
};

/// Frequency-domain content of every band for one slot: N rows, F bins each.
struct BandSpectra {
    Eigen::MatrixXcd grid;
    std::vector<double> band_power; ///< mean |X|^2 per bin, per band

    int n_bands() const { return static_cast<int>(grid.rows()); }
    int bins_per_band() const { return static_cast<int>(grid.cols()); }
};

/// Stationary vacancy p0 = p10 / (p10 + p01) per band.
std::vector<double> stationary_vacancy(const BandStatistics& stats);

OccupancyState init_occupancy(const BandStatistics& stats, Rng& rng);

/// Advance one slot. Throws ConfigError when the state length differs from
/// the statistics.
OccupancyState step_occupancy(const OccupancyState& state, const BandStatistics& stats, Rng& rng);

/// Flat-spectrum circularly-symmetric complex Gaussian content on busy bands,
/// scaled so each busy row has mean per-bin power exactly `signal_power`.
/// Vacant rows are zero.
BandSpectra synthesize_band_spectra(const OccupancyState& state, int bins_per_band,
                                    double signal_power, Rng& rng);

} // namespace wss
