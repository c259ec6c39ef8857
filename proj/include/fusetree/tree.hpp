#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fusetree/weights.hpp"

namespace fusetree {

struct FusionEvent {
    double lambda = 0.0;
    int left = -1;     // child node id (leaf: [0,K), internal: K + event index)
    int right = -1;
    int id = -1;       // this node's id, K + event index
    double beta = 0.0;
    double slope = 0.0;  // merged cluster slope after this fusion
    std::int64_t size = 0;
};

struct Partition {
    std::vector<int> cluster_of;  // group index -> cluster id in [0, num_clusters)
    int num_clusters = 0;

    bool operator==(const Partition& other) const;
    // Canonical relabeling: cluster ids in order of first appearance.
    void canonicalize();
};

// The whole regularization path: K leaves, K-1 fusion events sorted by lambda,
// and per-node linear segments beta(lambda) = beta_start + slope*(lambda - lambda_start).
class FusionTree {
public:
    struct Leaf {
        int id = 0;
        std::string label;
        std::int64_t n = 0;
        double mean = 0.0;
    };

    FusionTree() = default;
    FusionTree(std::vector<Leaf> leaves, std::vector<FusionEvent> events,
               WeightScheme scheme, std::int64_t n_total);

    int k() const { return static_cast<int>(leaves_.size()); }
    std::int64_t n_total() const { return n_total_; }
    const WeightScheme& scheme() const { return scheme_; }
    const std::vector<Leaf>& leaves() const { return leaves_; }
    const std::vector<FusionEvent>& events() const { return events_; }

    double root_lambda() const;  // 0 for K = 1
    double grand_mean() const;

    double beta_at(int group, double lambda) const;
    Partition cut(double lambda) const;

    struct CutK {
        Partition partition;
        double lambda_lo = 0.0;
        double lambda_hi = 0.0;  // +inf for the root level
        bool exact = true;       // false when ties skip the requested size
    };
    CutK cut_k(int target_clusters) const;

    std::string to_newick() const;
    std::string to_json() const;
    static FusionTree from_json(const std::string& doc);

    // Segment accessors (node id over [0, 2K-1)); used by the CV sweep.
    double seg_lambda(int node) const { return seg_lambda_[node]; }
    double seg_beta(int node) const { return seg_beta_[node]; }
    double seg_slope(int node) const { return seg_slope_[node]; }
    int parent(int node) const { return parent_[node]; }

private:
    void rebuild_index();

    std::vector<Leaf> leaves_;
    std::vector<FusionEvent> events_;
    WeightScheme scheme_;
    std::int64_t n_total_ = 0;

    std::vector<int> parent_;  // -1 for the root
    std::vector<double> seg_lambda_, seg_beta_, seg_slope_;
};

// Newick reader for round-trips and interop checks.
struct NewickNode {
    std::string name;
    double length = 0.0;
    std::vector<NewickNode> children;
};
NewickNode parse_newick(const std::string& text);

}  // namespace fusetree
