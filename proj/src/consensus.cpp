#include "fusetree/consensus.hpp"

#include <cmath>
#include <future>
#include <limits>
#include <map>
#include <thread>

#include "fusetree/errors.hpp"

namespace fusetree {

std::vector<FusionTree> fit_multivariate(const Dataset& data, const WeightScheme& scheme,
                                         int threads) {
    if (data.p() < 1) throw DataError("no features");
    auto fit_one = [&](int j) {
        return fit_univariate(summarize(data, j), data.group_labels, scheme);
    };
    std::vector<FusionTree> trees;
    trees.reserve(data.p());
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads > 1 && data.p() > 1) {
        std::vector<std::future<FusionTree>> jobs;
        for (int j = 0; j < data.p(); ++j)
            jobs.push_back(std::async(std::launch::async, fit_one, j));
        for (auto& job : jobs) trees.push_back(job.get());
    } else {
        for (int j = 0; j < data.p(); ++j) trees.push_back(fit_one(j));
    }
    return trees;
}

Partition consensus(const std::vector<FusionTree>& trees,
                    const std::vector<double>& lambda_per_feature) {
    if (trees.empty()) throw DataError("consensus: no trees");
    if (trees.size() != lambda_per_feature.size())
        throw DataError("consensus: one lambda per tree required");
    const int K = trees[0].k();
    for (const auto& t : trees)
        if (t.k() != K) throw DataError("consensus: trees have different leaf sets");

    std::vector<Partition> cuts;
    cuts.reserve(trees.size());
    for (std::size_t j = 0; j < trees.size(); ++j)
        cuts.push_back(trees[j].cut(lambda_per_feature[j]));

    // Key each group on its tuple of per-feature cluster ids.
    Partition out;
    out.cluster_of.resize(K);
    std::map<std::vector<int>, int> ids;
    for (int g = 0; g < K; ++g) {
        std::vector<int> key(trees.size());
        for (std::size_t j = 0; j < trees.size(); ++j) key[j] = cuts[j].cluster_of[g];
        auto [it, inserted] = ids.emplace(std::move(key), static_cast<int>(ids.size()));
        out.cluster_of[g] = it->second;
    }
    out.num_clusters = static_cast<int>(ids.size());
    out.canonicalize();
    return out;
}

Partition consensus(const std::vector<FusionTree>& trees, double lambda) {
    return consensus(trees, std::vector<double>(trees.size(), lambda));
}

double adjusted_rand_index(const Partition& a, const Partition& b) {
    if (a.cluster_of.size() != b.cluster_of.size())
        throw DataError("ARI: partitions cover different group sets");
    const int n = static_cast<int>(a.cluster_of.size());
    std::vector<std::vector<std::int64_t>> table(a.num_clusters,
                                                 std::vector<std::int64_t>(b.num_clusters, 0));
    for (int i = 0; i < n; ++i) ++table[a.cluster_of[i]][b.cluster_of[i]];

    auto comb2 = [](std::int64_t m) { return 0.5 * static_cast<double>(m) * (m - 1); };
    double index = 0.0, row_sum = 0.0, col_sum = 0.0;
    std::vector<std::int64_t> cols(b.num_clusters, 0);
    for (int i = 0; i < a.num_clusters; ++i) {
        std::int64_t row = 0;
        for (int j = 0; j < b.num_clusters; ++j) {
            index += comb2(table[i][j]);
            row += table[i][j];
            cols[j] += table[i][j];
        }
        row_sum += comb2(row);
    }
    for (auto c : cols) col_sum += comb2(c);
    const double expected = row_sum * col_sum / comb2(n);
    const double maximum = 0.5 * (row_sum + col_sum);
    if (maximum == expected) return 1.0;  // both partitions trivial
    return (index - expected) / (maximum - expected);
}

BestAri best_ari_over_cuts(const FusionTree& tree, const Partition& reference) {
    if (static_cast<int>(reference.cluster_of.size()) != tree.k())
        throw DataError("reference partition does not cover all leaves");
    const int K = tree.k();
    BestAri best;
    for (int j = 0; j < K; ++j) {  // j events applied
        const double lo = j == 0 ? 0.0 : tree.events()[j - 1].lambda;
        const double hi = j == K - 1 ? std::numeric_limits<double>::infinity()
                                     : tree.events()[j].lambda;
        if (!(hi > lo) && !(j == 0 && K == 1)) continue;  // tie-skipped level
        const double ari = adjusted_rand_index(tree.cut(lo), reference);
        if (ari > best.ari) {
            best.ari = ari;
            best.lambda = std::isfinite(hi) ? 0.5 * (lo + hi) : lo;
            best.n_clusters = K - j;
        }
    }
    return best;
}

}  // namespace fusetree
