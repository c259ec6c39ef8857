#include <doctest.h>

#include <cmath>
#include <random>

#include "fusetree/cv.hpp"
#include "fusetree/errors.hpp"
#include "fusetree/path.hpp"
#include "helpers.hpp"

using namespace fusetree;
using testutil::labels_for;
using testutil::make_stats;

namespace {

Dataset random_grouped(std::mt19937_64& rng, int k, int per_group, double spread = 3.0) {
    Dataset data;
    data.columns.resize(1);
    std::uniform_real_distribution<double> center(0.0, spread);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (int g = 0; g < k; ++g) {
        data.group_labels.push_back("g" + std::to_string(g));
        const double mu = center(rng);
        for (int i = 0; i < per_group; ++i) {
            data.group_of.push_back(g);
            data.columns[0].push_back(mu + noise(rng));
        }
    }
    return data;
}

}  // namespace

TEST_CASE("make_grid geometric spacing") {
    FusionTree tree = fit_univariate(make_stats({1, 1}, {1.0, 0.0}), labels_for(2),
                                     {WeightKind::Default});
    LambdaGrid grid = make_grid(tree, 3);
    CHECK(grid.values[0] == doctest::Approx(0.05));
    CHECK(grid.values[1] == doctest::Approx(std::sqrt(0.05 * 0.525)));
    CHECK(grid.values[2] == doctest::Approx(0.525));

    LambdaGrid two = make_grid(tree, 2);
    CHECK(two.values.front() == doctest::Approx(0.05));
    CHECK(two.values.back() == doctest::Approx(0.525));

    FusionTree flat = fit_univariate(make_stats({1, 1}, {2.0, 2.0}), labels_for(2),
                                     {WeightKind::Default});
    CHECK_THROWS_AS(make_grid(flat, 5), DataError);
    CHECK_THROWS_AS(make_grid(tree, 1), DataError);
}

TEST_CASE("ClusterTestStats pooling is exact") {
    ClusterTestStats a{2, 2.0, 2.0};  // values {1,3}
    ClusterTestStats b{1, 5.0, 0.0};  // value {5}
    ClusterTestStats ab = pool(a, b);
    CHECK(ab.n == 3);
    CHECK(ab.mean == doctest::Approx(3.0));
    CHECK(ab.within_ss == doctest::Approx(8.0));
    ClusterTestStats with_empty = pool(a, {});
    CHECK(with_empty.n == 2);
    CHECK(with_empty.mean == 2.0);
}

TEST_CASE("single test point follows one quadratic across a segment") {
    FusionTree tree = fit_univariate(make_stats({1, 1}, {1.0, 0.0}), labels_for(2),
                                     {WeightKind::Default});
    TestSet test{{0}, {2.0}};
    LambdaGrid grid;
    grid.values = {0.1, 0.2, 0.3, 0.4};
    auto curve = cv_error_curve_embedded(tree, test, grid);
    for (int i = 0; i < 4; ++i) {
        const double beta = 1.0 - grid.values[i];  // leaf segment before fusion
        CHECK(curve[i] == doctest::Approx((2.0 - beta) * (2.0 - beta)).epsilon(1e-12));
    }
}

TEST_CASE("naive curve beyond the root predicts the grand train mean") {
    FusionTree tree = fit_univariate(make_stats({1, 1}, {1.0, 0.0}), labels_for(2),
                                     {WeightKind::Default});
    TestSet test{{0, 1}, {1.5, -0.5}};
    LambdaGrid grid;
    grid.values = {2.0, 5.0};
    auto curve = cv_error_curve_naive(tree, test, grid);
    const double expect = (1.5 - 0.5) * (1.5 - 0.5) + (-0.5 - 0.5) * (-0.5 - 0.5);
    CHECK(curve[0] == doctest::Approx(expect));
    CHECK(curve[1] == doctest::Approx(expect));
}

TEST_CASE("empty test set gives a zero curve") {
    FusionTree tree = fit_univariate(make_stats({1, 1}, {1.0, 0.0}), labels_for(2),
                                     {WeightKind::Default});
    LambdaGrid grid;
    grid.values = {0.1, 0.4};
    auto curve = cv_error_curve_embedded(tree, {}, grid);
    CHECK(curve[0] == 0.0);
    CHECK(curve[1] == 0.0);
    CHECK_THROWS_AS(cv_error_curve_embedded(tree, {{7}, {1.0}}, grid), DataError);
}

TEST_CASE("embedded equals naive on random instances") {
    std::mt19937_64 rng(73);
    for (const auto kind : {WeightKind::Default, WeightKind::ExpAdaptive, WeightKind::CasAnova}) {
        for (int rep = 0; rep < 20; ++rep) {
            const int k = 3 + static_cast<int>(rng() % 40);
            Dataset data = random_grouped(rng, k, 6);
            FusionTree full = fit_univariate(summarize(data, 0), data.group_labels,
                                             {kind, 0.8, 1.0});
            LambdaGrid grid = make_grid(full, 25);
            auto splits = split_folds(data, 3, rep);
            FusionTree train = fit_univariate(summarize_subset(data, 0, splits[0].train),
                                              data.group_labels, {kind, 0.8, 1.0});
            TestSet test;
            for (int i : splits[0].test) {
                test.groups.push_back(data.group_of[i]);
                test.values.push_back(data.columns[0][i]);
            }
            auto fast = cv_error_curve_embedded(train, test, grid);
            auto slow = cv_error_curve_naive(train, test, grid);
            for (int i = 0; i < grid.size(); ++i)
                CHECK(fast[i] == doctest::Approx(slow[i]).epsilon(1e-8));
        }
    }
}

TEST_CASE("cross_validate modes agree and are deterministic") {
    std::mt19937_64 rng(79);
    Dataset data = random_grouped(rng, 25, 8);
    WeightScheme fa{WeightKind::ExpAdaptive, 1.0, 1.0};
    CvReport embedded = cross_validate(data, 0, fa, 4, 30, 5, CvMode::Embedded);
    CvReport naive = cross_validate(data, 0, fa, 4, 30, 5, CvMode::Naive);
    REQUIRE(embedded.grid.size() == naive.grid.size());
    for (int i = 0; i < embedded.grid.size(); ++i) {
        CHECK(embedded.mean_error[i] ==
              doctest::Approx(naive.mean_error[i]).epsilon(1e-8));
        CHECK(embedded.std_error[i] == doctest::Approx(naive.std_error[i]).epsilon(1e-6));
    }
    CHECK(embedded.best_lambda == naive.best_lambda);
    CHECK(embedded.mean_error[embedded.best_index] ==
          *std::min_element(embedded.mean_error.begin(), embedded.mean_error.end()));

    CvReport again = cross_validate(data, 0, fa, 4, 30, 5, CvMode::Embedded);
    CHECK(again.mean_error == embedded.mean_error);
    CHECK(again.best_lambda == embedded.best_lambda);
    CHECK_THROWS_AS(cross_validate(data, 0, fa, 1, 30, 5, CvMode::Embedded), DataError);
}
