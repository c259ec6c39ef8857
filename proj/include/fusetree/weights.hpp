#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fusetree {

enum class WeightKind { Default, ExpAdaptive, CasAnova };

struct WeightScheme {
    WeightKind kind = WeightKind::Default;
    double alpha = 1.0;  // ExpAdaptive only
    double gamma = 1.0;  // ExpAdaptive only

    // Default and ExpAdaptive are no-split families; CasAnova is run through
    // the same solver with the order assumption imposed, not proven.
    bool order_guaranteed() const { return kind != WeightKind::CasAnova; }

    void validate() const;
    std::string name() const;
    static WeightScheme parse(const std::string& name, double alpha, double gamma);
};

// w_{kl} for one pair of groups. CasAnova with equal means throws DataError
// ("infinite weight"); callers pre-merge equal-mean groups first.
double pairwise_weight(const WeightScheme& scheme,
                       std::int64_t n_k, double mean_k,
                       std::int64_t n_l, double mean_l,
                       std::int64_t n_total);

// Initial path slopes d(beta_k)/d(lambda) at lambda = 0 for clusters sorted by
// strictly decreasing mean. ExpAdaptive with gamma = 1 uses the stabilized
// O(K) recurrences (all exponents <= 0); Default uses prefix sums; everything
// else falls back to the O(K^2) direct sum.
std::vector<double> initial_slopes(const WeightScheme& scheme,
                                   const std::vector<std::int64_t>& sizes,
                                   const std::vector<double>& means,
                                   std::int64_t n_total);

}  // namespace fusetree
