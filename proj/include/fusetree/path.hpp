#pragma once

#include <string>
#include <vector>

#include "fusetree/model.hpp"
#include "fusetree/tree.hpp"
#include "fusetree/weights.hpp"

namespace fusetree {

// One live cluster during the homotopy, with beta recorded at lambda_ref and
// extrapolated linearly: beta(lambda) = beta + slope * (lambda - lambda_ref).
struct ClusterState {
    double beta = 0.0;
    double slope = 0.0;
    double lambda_ref = 0.0;
    std::int64_t size = 0;

    double beta_at(double lambda) const {
        return beta + slope * (lambda - lambda_ref);
    }
};

// Candidate fusion time for two adjacent clusters, a above b in mean order.
// Returns lambda0 exactly when the gap is already closed, +infinity when the
// slopes are equal or the gap is opening.
double next_fusion_time(const ClusterState& a, const ClusterState& b, double lambda0);

ClusterState merge(const ClusterState& a, const ClusterState& b, double lambda);

struct PathDiagnostics {
    // Adjacent-gap violations seen while fitting (CasAnova only; the no-split
    // families assert instead).
    int order_warnings = 0;
};

FusionTree fit_univariate(const GroupStats& stats,
                          const std::vector<std::string>& labels,
                          const WeightScheme& scheme,
                          PathDiagnostics* diagnostics = nullptr);

}  // namespace fusetree
