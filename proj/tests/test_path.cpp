#include <doctest.h>

#include <cmath>
#include <random>

#include "fusetree/errors.hpp"
#include "fusetree/oracle.hpp"
#include "fusetree/path.hpp"
#include "helpers.hpp"

using namespace fusetree;
using testutil::labels_for;
using testutil::make_stats;

TEST_CASE("next_fusion_time") {
    ClusterState a{1.0, -1.0, 0.0, 1};
    ClusterState b{0.0, 1.0, 0.0, 1};
    CHECK(next_fusion_time(a, b, 0.0) == 0.5);

    ClusterState opening_a{1.0, 1.0, 0.0, 1};
    ClusterState opening_b{0.0, -1.0, 0.0, 1};
    CHECK(std::isinf(next_fusion_time(opening_a, opening_b, 0.0)));

    ClusterState equal_a{0.7, -2.0, 0.3, 1};
    ClusterState equal_b{0.7, 1.0, 0.3, 1};
    CHECK(next_fusion_time(equal_a, equal_b, 0.3) == 0.3);

    ClusterState parallel_a{1.0, 0.5, 0.0, 1};
    ClusterState parallel_b{0.0, 0.5, 0.0, 1};
    CHECK(std::isinf(next_fusion_time(parallel_a, parallel_b, 0.0)));
}

TEST_CASE("merge arithmetic") {
    ClusterState a{1.0, -2.0, 0.0, 1};
    ClusterState b{1.0, 1.0, 0.0, 2};
    ClusterState m = merge(a, b, 0.0);
    CHECK(m.size == 3);
    CHECK(m.slope == doctest::Approx(0.0));
}

TEST_CASE("merged slope matches direct recomputation from cluster weights") {
    // slope_C = -(1/n_C) sum_{l not in C} w_{Cl} sign(beta_C - beta_l) with
    // w_{Cl} summed over members, weights fixed at lambda = 0 statistics.
    std::mt19937_64 rng(31);
    for (int rep = 0; rep < 100; ++rep) {
        const int k = 2 + static_cast<int>(rng() % 49);
        GroupStats stats = testutil::random_stats(rng, k);
        WeightScheme scheme{WeightKind::Default};
        if (rep % 3 == 1) scheme = {WeightKind::ExpAdaptive, 0.8, 1.0};
        if (rep % 3 == 2) scheme = {WeightKind::CasAnova};
        FusionTree tree = fit_univariate(stats, labels_for(k), scheme);

        for (const auto& ev : tree.events()) {
            if (&ev == &tree.events().back()) continue;
            // betas of all live clusters at this event
            std::vector<double> beta(k);
            for (int g = 0; g < k; ++g) beta[g] = tree.beta_at(g, ev.lambda);
            const double beta_c = ev.beta;
            double acc = 0.0;
            for (int g = 0; g < k; ++g) {
                if (std::abs(beta[g] - beta_c) <= 1e-9 * (1.0 + std::abs(beta_c)))
                    continue;  // member of C
                for (int m = 0; m < k; ++m) {
                    if (std::abs(beta[m] - beta_c) > 1e-9 * (1.0 + std::abs(beta_c)))
                        continue;
                    acc -= pairwise_weight(scheme, stats.size[m], stats.mean[m],
                                           stats.size[g], stats.mean[g], stats.n_total) *
                           (beta_c > beta[g] ? 1.0 : -1.0);
                }
            }
            const double expected = acc / static_cast<double>(ev.size);
            CHECK(ev.slope == doctest::Approx(expected).epsilon(1e-10));
        }
    }
}

TEST_CASE("two-point analytic path") {
    FusionTree tree = fit_univariate(make_stats({1, 1}, {1.0, 0.0}), labels_for(2),
                                     {WeightKind::Default});
    REQUIRE(tree.events().size() == 1);
    CHECK(tree.events()[0].lambda == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(tree.events()[0].beta == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(tree.beta_at(0, 0.25) == doctest::Approx(0.75).epsilon(1e-13));
    CHECK(tree.beta_at(1, 0.25) == doctest::Approx(0.25).epsilon(1e-13));
}

TEST_CASE("three-point path events") {
    FusionTree tree = fit_univariate(make_stats({1, 1, 1}, {3.0, 1.0, 0.0}),
                                     labels_for(3), {WeightKind::Default});
    REQUIRE(tree.events().size() == 2);
    CHECK(tree.events()[0].lambda == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(tree.events()[0].beta == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(tree.events()[0].slope == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(tree.events()[1].lambda == doctest::Approx(5.0 / 6.0).epsilon(1e-13));
    CHECK(tree.events()[1].beta == doctest::Approx(4.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("equal means are pre-merged at lambda zero") {
    for (const WeightScheme scheme :
         {WeightScheme{WeightKind::Default}, WeightScheme{WeightKind::ExpAdaptive, 1.0, 1.0},
          WeightScheme{WeightKind::CasAnova}}) {
        FusionTree tree = fit_univariate(make_stats({1, 1, 1}, {2.0, 2.0, 5.0}),
                                         labels_for(3), scheme);
        REQUIRE(tree.events().size() == 2);
        CHECK(tree.events()[0].lambda == 0.0);
        CHECK(tree.events()[0].beta == 2.0);
        CHECK(tree.events()[1].lambda > 0.0);
    }
}

TEST_CASE("fit rejects empty input") {
    GroupStats stats;
    CHECK_THROWS_AS(fit_univariate(stats, {}, {WeightKind::Default}), DataError);
}

TEST_CASE("single group tree") {
    FusionTree tree = fit_univariate(make_stats({4}, {2.5}), labels_for(1),
                                     {WeightKind::Default});
    CHECK(tree.events().empty());
    CHECK(tree.beta_at(0, 10.0) == 2.5);
    CHECK(tree.grand_mean() == 2.5);
}

TEST_CASE("final merge lands on the grand weighted mean with slope zero") {
    std::mt19937_64 rng(37);
    for (int rep = 0; rep < 30; ++rep) {
        const int k = 2 + static_cast<int>(rng() % 12);
        GroupStats stats = testutil::random_stats(rng, k);
        FusionTree tree = fit_univariate(stats, labels_for(k),
                                         {WeightKind::ExpAdaptive, 1.0, 1.0});
        double mass = 0.0;
        for (int g = 0; g < k; ++g)
            mass += static_cast<double>(stats.size[g]) * stats.mean[g];
        const double grand = mass / static_cast<double>(stats.n_total);
        CHECK(tree.events().back().slope == 0.0);
        CHECK(tree.grand_mean() == doctest::Approx(grand).epsilon(1e-12));
    }
}

TEST_CASE("structural invariants on random instances") {
    std::mt19937_64 rng(41);
    for (const auto kind : {WeightKind::Default, WeightKind::ExpAdaptive}) {
        for (int rep = 0; rep < 25; ++rep) {
            const int k = 2 + static_cast<int>(rng() % 60);
            GroupStats stats = testutil::random_stats(rng, k);
            FusionTree tree =
                fit_univariate(stats, labels_for(k), {kind, 0.5, 1.0});
            CHECK(static_cast<int>(tree.events().size()) == k - 1);
            double prev = 0.0;
            for (const auto& ev : tree.events()) {
                CHECK(ev.lambda >= prev);
                prev = ev.lambda;
            }
            auto report = testutil::replay_invariants(tree);
            CHECK(report.order_preserved);
            CHECK(report.mass_conserved);
        }
    }
}

TEST_CASE("grand-mean conservation at random intermediate lambdas") {
    std::mt19937_64 rng(43);
    GroupStats stats = testutil::random_stats(rng, 25);
    FusionTree tree = fit_univariate(stats, labels_for(25), {WeightKind::Default});
    double mass = 0.0, scale = 1.0;
    for (int g = 0; g < 25; ++g) {
        mass += static_cast<double>(stats.size[g]) * stats.mean[g];
        scale += static_cast<double>(stats.size[g]) * std::abs(stats.mean[g]);
    }
    std::uniform_real_distribution<double> pick(0.0, 1.2 * tree.root_lambda());
    for (int i = 0; i < 10; ++i) {
        const double lambda = pick(rng);
        double sum = 0.0;
        for (int g = 0; g < 25; ++g)
            sum += static_cast<double>(stats.size[g]) * tree.beta_at(g, lambda);
        CHECK(std::abs(sum - mass) <= 1e-9 * scale);
    }
}
