#pragma once

#include <vector>

#include "fusetree/model.hpp"
#include "fusetree/weights.hpp"

namespace fusetree {
namespace oracle {

// Exact objective of the univariate weighted fusion problem,
//   1/2 sum_k n_k (mean_k - beta_k)^2 + lambda sum_{k < l} w_{kl} |beta_k - beta_l|.
// Each unordered pair is counted once, matching the slope convention
// d(beta_k)/d(lambda) = -(1/n_k) sum_{l != k} w_{kl} sign(mean_k - mean_l).
double objective(const GroupStats& stats, const WeightScheme& scheme,
                 double lambda, const std::vector<double>& beta);

struct ExactSolution {
    std::vector<double> beta;  // indexed like stats
    double objective = 0.0;
};

// Brute-force minimizer: enumerate all contiguous ordered partitions of the
// groups sorted by decreasing mean, evaluate each candidate's true objective,
// keep the best. Requires K <= 15 and pre-merged equal means.
ExactSolution solve_exact(const GroupStats& stats, const WeightScheme& scheme,
                          double lambda);

// Literal O(K^2) evaluation of the initial slopes; the reference the fast
// recurrences are checked against. Input sorted by strictly decreasing mean.
std::vector<double> slopes_direct(const WeightScheme& scheme,
                                  const std::vector<std::int64_t>& sizes,
                                  const std::vector<double>& means,
                                  std::int64_t n_total);

}  // namespace oracle
}  // namespace fusetree
