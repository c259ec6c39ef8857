#include "fusetree/path.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fusetree/errors.hpp"
#include "fusetree/event_queue.hpp"

namespace fusetree {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLambdaCeiling = 1e300;
}

double next_fusion_time(const ClusterState& a, const ClusterState& b, double lambda0) {
    const double gap = a.beta_at(lambda0) - b.beta_at(lambda0);
    if (gap == 0.0) return lambda0;
    const double dslope = a.slope - b.slope;
    if (dslope == 0.0) return kInf;
    const double t = lambda0 - gap / dslope;
    return t > lambda0 ? t : kInf;
}

ClusterState merge(const ClusterState& a, const ClusterState& b, double lambda) {
    ClusterState m;
    m.size = a.size + b.size;
    // The two betas coincide at the fusion time; the size-weighted average
    // conserves the running weighted mean exactly under rounding.
    m.beta = (static_cast<double>(a.size) * a.beta_at(lambda) +
              static_cast<double>(b.size) * b.beta_at(lambda)) /
             static_cast<double>(m.size);
    m.slope = (static_cast<double>(a.size) * a.slope +
               static_cast<double>(b.size) * b.slope) /
              static_cast<double>(m.size);
    m.lambda_ref = lambda;
    return m;
}

FusionTree fit_univariate(const GroupStats& stats,
                          const std::vector<std::string>& labels,
                          const WeightScheme& scheme,
                          PathDiagnostics* diagnostics) {
    scheme.validate();
    const int K = stats.k();
    if (K == 0) throw DataError("cannot fit on empty input");
    if (static_cast<int>(labels.size()) != K)
        throw DataError("label count does not match group count");
    for (int g = 0; g < K; ++g)
        if (stats.size[g] <= 0)
            throw DataError("group '" + labels[g] + "' has no observations");

    std::vector<FusionTree::Leaf> leaves(K);
    for (int g = 0; g < K; ++g)
        leaves[g] = {g, labels[g], stats.size[g], stats.mean[g]};

    // Sort by decreasing mean, group index breaking exact ties.
    std::vector<int> order(K);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (stats.mean[a] != stats.mean[b]) return stats.mean[a] > stats.mean[b];
        return a < b;
    });

    std::vector<FusionEvent> events;
    events.reserve(K - 1);

    // Pre-merge runs of exactly equal means with zero-lambda events. Their
    // slopes are filled in once the merged clusters' slopes are known.
    std::vector<std::int64_t> sizes;       // per merged cluster, sorted order
    std::vector<double> means;
    std::vector<int> node_of_cluster;      // tree node id carrying the cluster
    std::vector<int> position;             // first sorted index of the cluster
    std::vector<int> premerge_cluster;     // event index -> cluster index
    for (int i = 0; i < K;) {
        int j = i;
        std::int64_t n_run = 0;
        int node = order[i];
        while (j < K && stats.mean[order[j]] == stats.mean[order[i]]) {
            n_run += stats.size[order[j]];
            if (j > i) {
                FusionEvent ev;
                ev.lambda = 0.0;
                ev.left = node;
                ev.right = order[j];
                ev.id = K + static_cast<int>(events.size());
                ev.beta = stats.mean[order[i]];
                ev.size = n_run;
                node = ev.id;
                premerge_cluster.push_back(static_cast<int>(sizes.size()));
                events.push_back(ev);
            }
            ++j;
        }
        sizes.push_back(n_run);
        means.push_back(stats.mean[order[i]]);
        node_of_cluster.push_back(node);
        position.push_back(i);
        i = j;
    }

    const int m = static_cast<int>(sizes.size());
    std::vector<double> slopes = initial_slopes(scheme, sizes, means, stats.n_total);
    for (std::size_t e = 0; e < premerge_cluster.size(); ++e)
        events[e].slope = m == 1 ? 0.0 : slopes[premerge_cluster[e]];

    // Live clusters as a doubly linked list in sorted-mean order; candidate
    // fusion per adjacent pair keyed by the pair's left cluster.
    const int capacity = 2 * m - 1;
    std::vector<ClusterState> state(capacity);
    std::vector<int> node(capacity), left(capacity, -1), right(capacity, -1),
        pos(capacity, 0);
    for (int c = 0; c < m; ++c) {
        state[c] = {means[c], slopes[c], 0.0, sizes[c]};
        node[c] = node_of_cluster[c];
        left[c] = c - 1;
        right[c] = c + 1 < m ? c + 1 : -1;
        pos[c] = position[c];
    }

    EventQueue queue(capacity);
    for (int c = 0; c + 1 < m; ++c)
        queue.push_or_update(c, {next_fusion_time(state[c], state[c + 1], 0.0), pos[c]});

    double last_lambda = 0.0;
    int next_free = m;
    const bool strict_order = scheme.order_guaranteed();
    for (int step = 0; step + 1 < m; ++step) {
        auto [li, key] = queue.pop_min();
        double t = key.lambda;
        if (!std::isfinite(t)) {
            // Every remaining weight underflowed to zero (enormous gaps), so
            // the true fusion times lie beyond double range. Record the
            // remaining merges at a finite ceiling instead.
            t = std::max(last_lambda, kLambdaCeiling);
        }
        if (t < last_lambda) {
            // Candidates in the queue are never below the last event in the
            // no-split regime; only rounding noise can land here.
            if (t < last_lambda - 1e-9 * (1.0 + last_lambda)) {
                if (strict_order)
                    throw InternalError("fusion time moved backwards; order preservation violated");
                if (diagnostics) ++diagnostics->order_warnings;
            }
            t = last_lambda;
        }
        const int ri = right[li];
        const int merged = next_free++;
        state[merged] = merge(state[li], state[ri], t);
        const bool final_merge = step + 2 == m;
        if (final_merge) {
            // The terminal cluster is exactly the grand weighted mean with no
            // pull left; pin both instead of keeping the extrapolation noise.
            state[merged].slope = 0.0;
            double mass = 0.0;
            for (int g = 0; g < K; ++g)
                mass += static_cast<double>(stats.size[g]) * stats.mean[g];
            state[merged].beta = mass / static_cast<double>(stats.n_total);
        }

        FusionEvent ev;
        ev.lambda = t;
        ev.left = node[li];
        ev.right = node[ri];
        ev.id = K + static_cast<int>(events.size());
        ev.beta = state[merged].beta;
        ev.slope = state[merged].slope;
        ev.size = state[merged].size;
        events.push_back(ev);

        node[merged] = ev.id;
        pos[merged] = pos[li];
        left[merged] = left[li];
        right[merged] = right[ri];
        queue.remove(ri);
        if (left[merged] >= 0) {
            right[left[merged]] = merged;
            queue.push_or_update(left[merged],
                                 {next_fusion_time(state[left[merged]], state[merged], t),
                                  pos[left[merged]]});
        }
        if (right[merged] >= 0) {
            left[right[merged]] = merged;
            queue.push_or_update(merged,
                                 {next_fusion_time(state[merged], state[right[merged]], t),
                                  pos[merged]});
        }
        last_lambda = t;
    }

    return FusionTree(std::move(leaves), std::move(events), scheme, stats.n_total);
}

}  // namespace fusetree
