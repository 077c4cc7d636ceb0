#include "wss/selection_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "wss/error.hpp"

namespace wss {

std::vector<double> poisson_binomial_pmf(std::span<const double> busy_probs, int max_count) {
    if (max_count < 0) {
        throw UsageError("max_count must be nonnegative");
    }
    std::vector<double> pmf(static_cast<std::size_t>(max_count) + 1, 0.0);
    pmf[0] = 1.0;
    int reach = 0; // highest count with nonzero mass so far
    for (double q : busy_probs) {
        if (!(q >= 0.0 && q <= 1.0)) {
            throw UsageError("busy probability " + std::to_string(q) + " outside [0, 1]");
        }
        reach = std::min(reach + 1, max_count);
        for (int i = reach; i >= 1; --i) {
            pmf[i] = pmf[i] * (1.0 - q) + pmf[i - 1] * q;
        }
        pmf[0] *= 1.0 - q;
    }
    return pmf;
}

double success_probability(std::span<const double> vacancy_probs, int k_branches) {
    if (vacancy_probs.empty()) {
        throw UsageError("success_probability needs a nonempty band set");
    }
    if (static_cast<int>(vacancy_probs.size()) <= k_branches) {
        return 1.0;
    }
    std::vector<double> busy(vacancy_probs.size());
    std::transform(vacancy_probs.begin(), vacancy_probs.end(), busy.begin(),
                   [](double v) { return 1.0 - v; });
    const auto pmf = poisson_binomial_pmf(busy, k_branches / 2);
    return std::min(1.0, std::accumulate(pmf.begin(), pmf.end(), 0.0));
}

double throughput_objective(std::span<const double> vacancy_probs, int k_branches) {
    const double sum = std::accumulate(vacancy_probs.begin(), vacancy_probs.end(), 0.0);
    return success_probability(vacancy_probs, k_branches) * sum;
}

std::vector<int> rank_by_vacancy(std::span<const double> vacancy_probs) {
    std::vector<int> order(vacancy_probs.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return vacancy_probs[a] > vacancy_probs[b]; });
    return order;
}

SizeDecision optimize_size(std::span<const double> vacancy_probs, int k_branches) {
    const int n = static_cast<int>(vacancy_probs.size());
    if (k_branches < 1 || k_branches > n) {
        throw UsageError("optimize_size needs 1 <= K <= N");
    }
    const auto order = rank_by_vacancy(vacancy_probs);
    std::vector<double> prefix;
    prefix.reserve(order.size());
    SizeDecision best;
    for (int m = 1; m <= n; ++m) {
        prefix.push_back(vacancy_probs[order[m - 1]]);
        if (m < k_branches) {
            continue;
        }
        const double p = success_probability(prefix, k_branches);
        const double value = p * std::accumulate(prefix.begin(), prefix.end(), 0.0);
        if (best.size == 0 || value > best.objective_value) {
            best = {m, value, p};
        }
    }
    return best;
}

ExplorationThreshold exploration_threshold(int n_bands, int k_branches, double mu, double delta) {
    if (!(mu > 0.0 && mu < 1.0)) {
        throw ConfigError("mu must lie in (0, 1), got " + std::to_string(mu));
    }
    if (!(delta > 0.0 && delta < 1.0)) {
        throw ConfigError("delta must lie in (0, 1), got " + std::to_string(delta));
    }
    if (k_branches < 1 || k_branches > n_bands) {
        throw ConfigError("exploration_threshold needs 1 <= K <= N");
    }
    const double bound = 2.0 / (mu * mu) * std::log(2.0 * n_bands / delta);
    ExplorationThreshold out;
    out.observations = static_cast<std::int64_t>(std::ceil(bound));
    const std::int64_t groups = (n_bands + k_branches - 1) / k_branches;
    out.slots = 2 * groups * out.observations;
    return out;
}

bool mu_correct(std::span<const double> estimates, std::span<const double> truth, double mu) {
    if (estimates.size() != truth.size()) {
        throw UsageError("estimate and truth vectors differ in length");
    }
    for (std::size_t n = 0; n < truth.size(); ++n) {
        if (!(std::abs(estimates[n] - truth[n]) < mu / 2.0)) {
            return false;
        }
    }
    return true;
}

} // namespace wss
