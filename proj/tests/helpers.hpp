#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "fusetree/model.hpp"
#include "fusetree/tree.hpp"

namespace testutil {

inline fusetree::GroupStats make_stats(std::vector<std::int64_t> sizes,
                                       std::vector<double> means) {
    fusetree::GroupStats stats;
    stats.size = std::move(sizes);
    stats.mean = std::move(means);
    stats.within_ss.assign(stats.size.size(), 0.0);
    stats.n_total = 0;
    for (auto s : stats.size) stats.n_total += s;
    return stats;
}

inline std::vector<std::string> labels_for(int k) {
    std::vector<std::string> labels(k);
    for (int g = 0; g < k; ++g) labels[g] = "g" + std::to_string(g + 1);
    return labels;
}

inline fusetree::GroupStats random_stats(std::mt19937_64& rng, int k,
                                         double spread = 3.0, int max_size = 20) {
    std::uniform_int_distribution<int> size(1, max_size);
    std::uniform_real_distribution<double> mean(0.0, spread);
    std::vector<std::int64_t> sizes(k);
    std::vector<double> means(k);
    for (int g = 0; g < k; ++g) {
        sizes[g] = size(rng);
        means[g] = mean(rng);
    }
    return make_stats(std::move(sizes), std::move(means));
}

// Replays the fitted path, checking at every event that live-cluster betas in
// sorted-mean order are nonincreasing (order preservation) and that the size-
// weighted beta sum equals the grand sum (conservation). Walks leaves in
// sorted-mean order; live clusters are contiguous, so adjacency checks suffice.
struct ReplayReport {
    bool order_preserved = true;
    bool mass_conserved = true;
    double max_order_violation = 0.0;
    double max_mass_error = 0.0;
};

inline ReplayReport replay_invariants(const fusetree::FusionTree& tree) {
    const int K = tree.k();
    ReplayReport report;
    double grand_sum = 0.0, scale = 0.0;
    for (const auto& leaf : tree.leaves()) {
        grand_sum += static_cast<double>(leaf.n) * leaf.mean;
        scale += static_cast<double>(leaf.n) * std::abs(leaf.mean);
    }
    scale = std::max(scale, 1.0);

    // live cluster list: node id, intercept/slope, size; ordered by mean
    struct Live {
        int node;
        double a, b;
        std::int64_t n;
    };
    std::vector<int> order(K);
    for (int g = 0; g < K; ++g) order[g] = g;
    std::sort(order.begin(), order.end(), [&](int x, int y) {
        if (tree.leaves()[x].mean != tree.leaves()[y].mean)
            return tree.leaves()[x].mean > tree.leaves()[y].mean;
        return x < y;
    });
    std::vector<Live> live;
    std::vector<int> slot(2 * K - 1, -1);
    for (int i = 0; i < K; ++i) {
        const int g = order[i];
        const double b = tree.seg_slope(g);
        live.push_back({g, tree.leaves()[g].mean, b, tree.leaves()[g].n});
        slot[g] = i;
    }
    // positions shrink via tombstones, skipped while scanning
    std::vector<bool> dead(live.size(), false);

    auto check_state = [&](double lambda) {
        double prev = std::numeric_limits<double>::infinity();
        double mass = 0.0;
        for (std::size_t i = 0; i < live.size(); ++i) {
            if (dead[i]) continue;
            const double beta = live[i].a + live[i].b * lambda;
            if (beta > prev + 1e-9 * (1.0 + std::abs(prev)))
                report.max_order_violation =
                    std::max(report.max_order_violation, beta - prev);
            prev = beta;
            mass += static_cast<double>(live[i].n) * beta;
        }
        report.max_mass_error =
            std::max(report.max_mass_error, std::abs(mass - grand_sum) / scale);
    };

    for (const auto& ev : tree.events()) {
        check_state(ev.lambda);
        const int li = slot[ev.left];
        const int ri = slot[ev.right];
        // replace the leftmost (higher-mean) slot with the merged cluster
        const int keep = std::min(li, ri);
        const int drop = std::max(li, ri);
        dead[drop] = true;
        live[keep] = {ev.id, ev.beta - ev.slope * ev.lambda, ev.slope,
                      ev.size};
        slot[ev.id] = keep;
    }
    if (!tree.events().empty()) check_state(tree.root_lambda());
    report.order_preserved = report.max_order_violation == 0.0;
    report.mass_conserved = report.max_mass_error <= 1e-9;
    return report;
}

}  // namespace testutil
