#pragma once

#include <cstdint>
#include <vector>

#include "fusetree/model.hpp"
#include "fusetree/tree.hpp"

namespace fusetree {

struct LambdaGrid {
    std::vector<double> values;  // strictly increasing, size >= 2
    int size() const { return static_cast<int>(values.size()); }
};

// Geometric grid over [first positive event / 10, 1.05 * root lambda].
LambdaGrid make_grid(const FusionTree& tree, int points);
LambdaGrid make_grid(double lambda_min, double lambda_max, int points);

// Test-side sufficient statistics of one cluster; pooling two of them with the
// Huygens cross-term reproduces the joint statistics exactly.
struct ClusterTestStats {
    std::int64_t n = 0;
    double mean = 0.0;
    double within_ss = 0.0;
};
ClusterTestStats pool(const ClusterTestStats& a, const ClusterTestStats& b);

struct TestSet {
    std::vector<int> groups;     // group index per test observation
    std::vector<double> values;
};

// Single sweep over the tree: the error is piecewise quadratic in lambda, with
// per-cluster contributions swapped in O(1) at each fusion. O(K + L).
std::vector<double> cv_error_curve_embedded(const FusionTree& train_tree,
                                            const TestSet& test,
                                            const LambdaGrid& grid);

// Per-observation beta_at lookups at every grid point. O(L * |T| * depth).
std::vector<double> cv_error_curve_naive(const FusionTree& train_tree,
                                         const TestSet& test,
                                         const LambdaGrid& grid);

enum class CvMode { Embedded, Naive };

struct CvReport {
    LambdaGrid grid;
    std::vector<double> mean_error;   // across folds, per grid point
    std::vector<double> std_error;
    std::vector<int> n_clusters;      // of the full-data tree, per grid point
    double best_lambda = 0.0;
    int best_index = 0;
    int folds = 0;
};

CvReport cross_validate(const Dataset& data, int feature, const WeightScheme& scheme,
                        int folds, const LambdaGrid& grid, std::uint64_t seed,
                        CvMode mode, int threads = 0);

// Grid construction + validation in one step (grid built from the full-data fit).
CvReport cross_validate(const Dataset& data, int feature, const WeightScheme& scheme,
                        int folds, int grid_size, std::uint64_t seed, CvMode mode,
                        int threads = 0);

}  // namespace fusetree
