#include "wss/spectrum_model.hpp"

#include <cmath>
#include <string>

#include "wss/error.hpp"

namespace wss {

namespace {

void check_probability(double p, const char* name, std::size_t band) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw ConfigError(std::string(name) + "[" + std::to_string(band) +
                          "] = " + std::to_string(p) + " is not a probability");
    }
}

} // namespace

BandStatistics::BandStatistics(std::vector<double> p01, std::vector<double> p10)
    : p01_(std::move(p01)), p10_(std::move(p10)) {
    if (p01_.empty()) {
        throw ConfigError("band statistics need at least one band");
    }
    if (p01_.size() != p10_.size()) {
        throw ConfigError("p01 has " + std::to_string(p01_.size()) + " bands but p10 has " +
                          std::to_string(p10_.size()));
    }
    for (std::size_t n = 0; n < p01_.size(); ++n) {
        check_probability(p01_[n], "p01", n);
        check_probability(p10_[n], "p10", n);
        if (p01_[n] + p10_[n] <= 0.0) {
            throw ConfigError("band " + std::to_string(n) +
                              " has p01 + p10 = 0; stationary vacancy is undefined");
        }
    }
}

BandStatistics BandStatistics::from_stationary(std::span<const double> p0, double lambda) {
    if (!(lambda > 0.0 && lambda <= 1.0)) {
        throw ConfigError("mixing parameter lambda must lie in (0, 1], got " +
                          std::to_string(lambda));
    }
    std::vector<double> p01, p10;
    p01.reserve(p0.size());
    p10.reserve(p0.size());
    for (std::size_t n = 0; n < p0.size(); ++n) {
        check_probability(p0[n], "p0", n);
        p10.push_back(lambda * p0[n]);
        p01.push_back(lambda * (1.0 - p0[n]));
    }
    return BandStatistics(std::move(p01), std::move(p10));
}

std::vector<double> stationary_vacancy(const BandStatistics& stats) {
    std::vector<double> p0(stats.n_bands());
    for (int n = 0; n < stats.n_bands(); ++n) {
        p0[n] = stats.p10(n) / (stats.p10(n) + stats.p01(n));
    }
    return p0;
}

OccupancyState init_occupancy(const BandStatistics& stats, Rng& rng) {
    const auto p0 = stationary_vacancy(stats);
    OccupancyState state;
    state.statuses.resize(p0.size());
    for (std::size_t n = 0; n < p0.size(); ++n) {
        state.statuses[n] = uniform01(rng) < p0[n] ? kVacant : kBusy;
    }
    return state;
}

OccupancyState step_occupancy(const OccupancyState& state, const BandStatistics& stats, Rng& rng) {
    if (state.n_bands() != stats.n_bands()) {
        throw ConfigError("occupancy state has " + std::to_string(state.n_bands()) +
                          " bands but statistics describe " + std::to_string(stats.n_bands()));
    }
    OccupancyState next;
    next.slot_index = state.slot_index + 1;
    next.statuses.resize(state.statuses.size());
    for (int n = 0; n < state.n_bands(); ++n) {
        // One uniform draw per band per slot keeps trajectories aligned across
        // bands regardless of their current states.
        const double u = uniform01(rng);
        if (state.statuses[n] == kVacant) {
            next.statuses[n] = u < stats.p01(n) ? kBusy : kVacant;
        } else {
            next.statuses[n] = u < stats.p10(n) ? kVacant : kBusy;
        }
    }
    return next;
}

BandSpectra synthesize_band_spectra(const OccupancyState& state, int bins_per_band,
                                    double signal_power, Rng& rng) {
    if (bins_per_band < 1) {
        throw UsageError("bins_per_band must be at least 1");
    }
    BandSpectra out;
    out.grid = Eigen::MatrixXcd::Zero(state.n_bands(), bins_per_band);
    out.band_power.assign(state.n_bands(), 0.0);
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    for (int n = 0; n < state.n_bands(); ++n) {
        if (!state.busy(n)) {
            continue;
        }
        for (int f = 0; f < bins_per_band; ++f) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            out.grid(n, f) = {re, im};
        }
        const double raw = out.grid.row(n).squaredNorm() / bins_per_band;
        if (raw > 0.0) {
            out.grid.row(n) *= std::sqrt(signal_power / raw);
        }
        out.band_power[n] = out.grid.row(n).squaredNorm() / bins_per_band;
    }
    return out;
}

} // namespace wss
