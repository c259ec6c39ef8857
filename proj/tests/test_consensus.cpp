#include <doctest.h>

#include <random>

#include "fusetree/consensus.hpp"
#include "fusetree/errors.hpp"
#include "helpers.hpp"

using namespace fusetree;
using testutil::labels_for;

namespace {

Partition make_partition(std::vector<int> cluster_of) {
    Partition p;
    p.cluster_of = std::move(cluster_of);
    p.num_clusters = 0;
    for (int c : p.cluster_of) p.num_clusters = std::max(p.num_clusters, c + 1);
    return p;
}

Partition random_partition(std::mt19937_64& rng, int n, int clusters) {
    std::uniform_int_distribution<int> pick(0, clusters - 1);
    std::vector<int> assign(n);
    for (int i = 0; i < clusters && i < n; ++i) assign[i] = i;  // all labels used
    for (int i = clusters; i < n; ++i) assign[i] = pick(rng);
    std::shuffle(assign.begin(), assign.end(), rng);
    Partition p = make_partition(assign);
    p.canonicalize();
    return p;
}

}  // namespace

TEST_CASE("fit_multivariate shapes") {
    Dataset data;
    data.columns = {{1.0, 2.0, 5.0}, {1.0, 2.0, 5.0}};
    data.group_of = {0, 1, 2};
    data.group_labels = {"a", "b", "c"};
    auto trees = fit_multivariate(data, {WeightKind::Default});
    REQUIRE(trees.size() == 2);
    // duplicated feature columns give identical trees
    for (std::size_t e = 0; e < trees[0].events().size(); ++e) {
        CHECK(trees[0].events()[e].lambda == doctest::Approx(trees[1].events()[e].lambda));
        CHECK(trees[0].events()[e].beta == doctest::Approx(trees[1].events()[e].beta));
    }
}

TEST_CASE("consensus of a single tree is the cut") {
    Dataset data;
    data.columns = {{1.0, 2.0, 5.0}};
    data.group_of = {0, 1, 2};
    data.group_labels = {"a", "b", "c"};
    auto trees = fit_multivariate(data, {WeightKind::Default});
    for (double lambda : {0.0, 0.3, 1.0, 10.0})
        CHECK(consensus(trees, lambda) == trees[0].cut(lambda));
}

TEST_CASE("consensus is the meet of per-feature cuts") {
    // feature 1 separates c from {a,b}; feature 2 separates a from {b,c}
    Dataset data;
    data.columns = {{0.0, 0.0, 4.0}, {0.0, 4.0, 4.0}};
    data.group_of = {0, 1, 2};
    data.group_labels = {"a", "b", "c"};
    auto trees = fit_multivariate(data, {WeightKind::Default});
    // pick a lambda where each tree still has its own 2-cluster split
    const double lambda = 0.5 * (trees[0].events()[0].lambda + trees[0].root_lambda());
    Partition meet = consensus(trees, lambda);
    CHECK(meet.num_clusters == 3);

    // beyond both roots: single cluster
    const double beyond = 2.0 * std::max(trees[0].root_lambda(), trees[1].root_lambda());
    CHECK(consensus(trees, beyond).num_clusters == 1);

    // meet refines each per-feature cut
    for (int j = 0; j < 2; ++j) {
        Partition cut = trees[j].cut(lambda);
        for (int g = 0; g < 3; ++g)
            for (int h = 0; h < 3; ++h)
                if (meet.cluster_of[g] == meet.cluster_of[h])
                    CHECK(cut.cluster_of[g] == cut.cluster_of[h]);
    }
}

TEST_CASE("consensus input validation") {
    CHECK_THROWS_AS(consensus({}, 0.1), DataError);
}

TEST_CASE("adjusted_rand_index hand values") {
    Partition a = make_partition({0, 1, 2, 3});
    Partition b = make_partition({0, 0, 0, 0});
    CHECK(adjusted_rand_index(a, b) == doctest::Approx(0.0));
    CHECK(adjusted_rand_index(a, a) == 1.0);
    CHECK(adjusted_rand_index(b, b) == 1.0);
    Partition c = make_partition({0, 0, 1, 1});
    Partition d = make_partition({0, 1, 1, 1});
    CHECK(adjusted_rand_index(c, d) == adjusted_rand_index(d, c));
    CHECK_THROWS_AS(adjusted_rand_index(a, make_partition({0, 1})), DataError);
}

TEST_CASE("ARI symmetry and relabel invariance on random partitions") {
    std::mt19937_64 rng(83);
    for (int rep = 0; rep < 100; ++rep) {
        const int n = 5 + static_cast<int>(rng() % 30);
        Partition a = random_partition(rng, n, 2 + rng() % 5);
        Partition b = random_partition(rng, n, 2 + rng() % 5);
        const double ab = adjusted_rand_index(a, b);
        CHECK(ab == doctest::Approx(adjusted_rand_index(b, a)).epsilon(1e-14));

        // shuffle a's cluster labels
        std::vector<int> relabel(a.num_clusters);
        for (int i = 0; i < a.num_clusters; ++i) relabel[i] = i;
        std::shuffle(relabel.begin(), relabel.end(), rng);
        Partition shuffled = a;
        for (int& c : shuffled.cluster_of) c = relabel[c];
        CHECK(adjusted_rand_index(shuffled, b) == doctest::Approx(ab).epsilon(1e-14));
        CHECK(adjusted_rand_index(a, a) == 1.0);
    }
}

TEST_CASE("best_ari_over_cuts") {
    Dataset data;
    data.columns = {{3.0, 1.0, 0.0}};
    data.group_of = {0, 1, 2};
    data.group_labels = {"a", "b", "c"};
    FusionTree tree = fit_multivariate(data, {WeightKind::Default})[0];

    Partition leaves = make_partition({0, 1, 2});
    auto fine = best_ari_over_cuts(tree, leaves);
    CHECK(fine.ari == 1.0);
    CHECK(fine.n_clusters == 3);
    CHECK(fine.lambda < tree.events()[0].lambda);

    Partition one = make_partition({0, 0, 0});
    auto coarse = best_ari_over_cuts(tree, one);
    CHECK(coarse.ari == 1.0);
    CHECK(coarse.n_clusters == 1);
    CHECK(coarse.lambda >= tree.root_lambda());

    Partition two = make_partition({0, 1, 1});  // {a} vs {b,c}
    auto mid = best_ari_over_cuts(tree, two);
    CHECK(mid.ari == 1.0);
    CHECK(mid.n_clusters == 2);
}
