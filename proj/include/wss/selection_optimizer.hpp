#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace wss {

/// P(exactly i of the independent bands are busy), i = 0..max_count.
/// Counts above max_count are dropped, so the result sums to P(count <= max_count).
std::vector<double> poisson_binomial_pmf(std::span<const double> busy_probs, int max_count);

/// Probability that a set with these vacancy probabilities reconstructs:
/// 1 when the set fits in K branches, otherwise P(busy count <= floor(K/2)).
double success_probability(std::span<const double> vacancy_probs, int k_branches);

/// Expected-throughput objective of a band set: P(success) * sum of vacancies.
double throughput_objective(std::span<const double> vacancy_probs, int k_branches);

/// Band indices sorted by vacancy probability, highest first, ties by index.
std::vector<int> rank_by_vacancy(std::span<const double> vacancy_probs);

struct SizeDecision {
    int size = 0;
    double objective_value = 0.0;
    double success_probability = 1.0;
};

/// Throughput-optimal number of sensed bands, searching the prefixes of the
/// vacancy ranking from K up to N. Ties go to the smaller size.
SizeDecision optimize_size(std::span<const double> vacancy_probs, int k_branches);

struct ExplorationThreshold {
    std::int64_t observations = 0; ///< Q, per band
    std::int64_t slots = 0;        ///< W = 2 * ceil(N/K) * Q
};

/// Observations per band (and exploration slots) after which every band's
/// stationary vacancy estimate is within mu/2 of the truth with probability
/// at least 1 - delta: Q = ceil((2 / mu^2) ln(2N / delta)).
ExplorationThreshold exploration_threshold(int n_bands, int k_branches, double mu, double delta);

/// True iff |estimate - truth| < mu / 2 for every band.
bool mu_correct(std::span<const double> estimates, std::span<const double> truth, double mu);

} // namespace wss
