#include "fusetree/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fusetree/errors.hpp"

namespace fusetree {
namespace oracle {

double objective(const GroupStats& stats, const WeightScheme& scheme,
                 double lambda, const std::vector<double>& beta) {
    const int K = stats.k();
    if (static_cast<int>(beta.size()) != K)
        throw DataError("objective: beta length mismatch");
    double loss = 0.0;
    for (int k = 0; k < K; ++k) {
        const double d = stats.mean[k] - beta[k];
        loss += 0.5 * static_cast<double>(stats.size[k]) * d * d;
    }
    double penalty = 0.0;
    for (int k = 0; k < K; ++k)
        for (int l = k + 1; l < K; ++l) {
            if (beta[k] == beta[l]) continue;
            penalty += pairwise_weight(scheme, stats.size[k], stats.mean[k],
                                       stats.size[l], stats.mean[l], stats.n_total) *
                       std::abs(beta[k] - beta[l]);
        }
    return loss + lambda * penalty;
}

ExactSolution solve_exact(const GroupStats& stats, const WeightScheme& scheme,
                          double lambda) {
    const int K = stats.k();
    if (K > 15) throw DataError("solve_exact: K > 15 refused (2^(K-1) candidates)");
    if (K == 0) throw DataError("solve_exact: empty input");

    std::vector<int> order(K);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return stats.mean[a] > stats.mean[b]; });
    for (int i = 1; i < K; ++i)
        if (stats.mean[order[i - 1]] == stats.mean[order[i]])
            throw DataError("solve_exact: equal means must be pre-merged");

    // Pairwise weights between sorted positions, fixed at lambda = 0 statistics.
    std::vector<std::vector<double>> w(K, std::vector<double>(K, 0.0));
    for (int a = 0; a < K; ++a)
        for (int b = 0; b < K; ++b)
            if (a != b)
                w[a][b] = pairwise_weight(scheme, stats.size[order[a]], stats.mean[order[a]],
                                          stats.size[order[b]], stats.mean[order[b]],
                                          stats.n_total);

    ExactSolution best;
    best.objective = std::numeric_limits<double>::infinity();

    // Bit i set in mask = a block boundary between sorted positions i and i+1.
    std::vector<double> beta_sorted(K), beta(K);
    for (std::uint64_t mask = 0; mask < (1ull << (K - 1)); ++mask) {
        int start = 0;
        for (int i = 0; i < K; ++i) {
            if (i < K - 1 && !(mask & (1ull << i))) continue;
            // Block of sorted positions [start, i]. Lemma-style stationary
            // value: higher blocks pull up (+w), lower blocks pull down (-w).
            std::int64_t n_block = 0;
            double mean_sum = 0.0, pull = 0.0;
            for (int a = start; a <= i; ++a) {
                n_block += stats.size[order[a]];
                mean_sum += static_cast<double>(stats.size[order[a]]) * stats.mean[order[a]];
                for (int b = 0; b < start; ++b) pull += w[a][b];
                for (int b = i + 1; b < K; ++b) pull -= w[a][b];
            }
            const double value =
                mean_sum / static_cast<double>(n_block) +
                lambda * pull / static_cast<double>(n_block);
            for (int a = start; a <= i; ++a) beta_sorted[a] = value;
            start = i + 1;
        }
        for (int a = 0; a < K; ++a) beta[order[a]] = beta_sorted[a];
        const double value = objective(stats, scheme, lambda, beta);
        if (value < best.objective) {
            best.objective = value;
            best.beta = beta;
        }
    }
    return best;
}

std::vector<double> slopes_direct(const WeightScheme& scheme,
                                  const std::vector<std::int64_t>& sizes,
                                  const std::vector<double>& means,
                                  std::int64_t n_total) {
    const std::size_t K = sizes.size();
    std::vector<double> slopes(K, 0.0);
    for (std::size_t k = 0; k < K; ++k) {
        double acc = 0.0;
        for (std::size_t l = 0; l < K; ++l) {
            if (l == k) continue;
            const double w = pairwise_weight(scheme, sizes[k], means[k],
                                             sizes[l], means[l], n_total);
            acc -= w * ((means[k] > means[l]) ? 1.0 : -1.0);
        }
        slopes[k] = acc / static_cast<double>(sizes[k]);
    }
    return slopes;
}

}  // namespace oracle
}  // namespace fusetree
