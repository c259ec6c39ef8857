#pragma once

#include <vector>

#include "fusetree/model.hpp"
#include "fusetree/path.hpp"
#include "fusetree/tree.hpp"

namespace fusetree {

// One tree per feature, in feature order.
std::vector<FusionTree> fit_multivariate(const Dataset& data, const WeightScheme& scheme,
                                         int threads = 0);

// Meet (common refinement) of the per-feature cuts at a shared lambda: two
// groups share a consensus cluster iff they are fused on every feature.
Partition consensus(const std::vector<FusionTree>& trees, double lambda);
Partition consensus(const std::vector<FusionTree>& trees,
                    const std::vector<double>& lambda_per_feature);

double adjusted_rand_index(const Partition& a, const Partition& b);

struct BestAri {
    double ari = -1.0;
    double lambda = 0.0;
    int n_clusters = 0;
};

// Scan every realized partition level of the tree against a reference.
BestAri best_ari_over_cuts(const FusionTree& tree, const Partition& reference);

}  // namespace fusetree
