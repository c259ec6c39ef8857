#include "fusetree/cv.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <thread>

#include "fusetree/errors.hpp"
#include "fusetree/path.hpp"

namespace fusetree {

LambdaGrid make_grid(double lambda_min, double lambda_max, int points) {
    if (points < 2) throw DataError("grid needs at least 2 points");
    if (!(lambda_min > 0) || !(lambda_max > lambda_min))
        throw DataError("grid bounds must satisfy 0 < min < max");
    LambdaGrid grid;
    grid.values.resize(points);
    const double ratio = std::pow(lambda_max / lambda_min,
                                  1.0 / static_cast<double>(points - 1));
    double v = lambda_min;
    for (int i = 0; i < points; ++i) {
        grid.values[i] = v;
        v *= ratio;
    }
    grid.values.back() = lambda_max;
    return grid;
}

LambdaGrid make_grid(const FusionTree& tree, int points) {
    double first_positive = 0.0;
    for (const auto& ev : tree.events())
        if (ev.lambda > 0) {
            first_positive = ev.lambda;
            break;
        }
    if (first_positive == 0.0)
        throw DataError("degenerate grid: all fusion events at lambda = 0");
    return make_grid(first_positive / 10.0, 1.05 * tree.root_lambda(), points);
}

ClusterTestStats pool(const ClusterTestStats& a, const ClusterTestStats& b) {
    if (a.n == 0) return b;
    if (b.n == 0) return a;
    ClusterTestStats out;
    out.n = a.n + b.n;
    const double na = static_cast<double>(a.n), nb = static_cast<double>(b.n);
    out.mean = (na * a.mean + nb * b.mean) / (na + nb);
    const double gap = a.mean - b.mean;
    out.within_ss = a.within_ss + b.within_ss + na * nb / (na + nb) * gap * gap;
    return out;
}

namespace {

std::vector<ClusterTestStats> leaf_test_stats(const FusionTree& tree, const TestSet& test) {
    std::vector<ClusterTestStats> stats(tree.k());
    std::vector<double> sums(tree.k(), 0.0);
    for (std::size_t i = 0; i < test.groups.size(); ++i) {
        const int g = test.groups[i];
        if (g < 0 || g >= tree.k())
            throw DataError("test observation's group is absent from the tree");
        ++stats[g].n;
        sums[g] += test.values[i];
    }
    for (int g = 0; g < tree.k(); ++g)
        if (stats[g].n > 0) stats[g].mean = sums[g] / static_cast<double>(stats[g].n);
    for (std::size_t i = 0; i < test.groups.size(); ++i) {
        const double d = test.values[i] - stats[test.groups[i]].mean;
        stats[test.groups[i]].within_ss += d * d;
    }
    return stats;
}

// Quadratic accumulator: error(lambda) = q2*lambda^2 + q1*lambda + q0 on the
// current inter-event segment. Extended precision because the coefficients
// can be large and nearly cancelling while the error itself stays small.
struct Quad {
    long double q2 = 0.0, q1 = 0.0, q0 = 0.0;

    void add(const ClusterTestStats& s, double a, double b, double sign) {
        // contribution: within_ss + n*(mean - a - b*lambda)^2
        const long double n = static_cast<long double>(s.n);
        const long double d = static_cast<long double>(s.mean) - a;
        const long double bl = b;
        q2 += sign * n * bl * bl;
        q1 += sign * -2.0L * n * d * bl;
        q0 += sign * (s.within_ss + n * d * d);
    }

    double at(double lambda) const {
        return static_cast<double>((q2 * lambda + q1) * lambda + q0);
    }
};

}  // namespace

std::vector<double> cv_error_curve_embedded(const FusionTree& tree,
                                            const TestSet& test,
                                            const LambdaGrid& grid) {
    const int K = tree.k();
    const int nodes = 2 * K - 1;
    std::vector<ClusterTestStats> node_stats(nodes);
    auto leaves = leaf_test_stats(tree, test);
    std::copy(leaves.begin(), leaves.end(), node_stats.begin());

    // Live clusters as an intrusive doubly linked list over node ids.
    std::vector<int> prev(nodes, -1), next(nodes, -1);
    int head = 0;
    for (int g = 0; g < K; ++g) {
        prev[g] = g - 1;
        next[g] = g + 1 < K ? g + 1 : -1;
    }

    std::vector<double> errors(grid.size());
    std::size_t gi = 0;
    double seg_start = 0.0;
    const auto& events = tree.events();

    // One segment per inter-event interval. Segments holding grid points get
    // a fresh quadratic in mu = lambda - seg_start built from the live
    // clusters; centering per segment keeps the coefficients small even when
    // event lambdas span many orders of magnitude.
    auto flush_segment = [&](double seg_end) {
        if (gi >= errors.size() || !(grid.values[gi] < seg_end)) return;
        Quad quad;
        for (int c = head; c >= 0; c = next[c]) {
            if (node_stats[c].n == 0 && node_stats[c].within_ss == 0.0) continue;
            const double b = tree.seg_slope(c);
            const double beta_here =
                tree.seg_beta(c) + b * (seg_start - tree.seg_lambda(c));
            quad.add(node_stats[c], beta_here, b, +1.0);
        }
        while (gi < errors.size() && grid.values[gi] < seg_end)
            errors[gi] = quad.at(grid.values[gi] - seg_start), ++gi;
    };

    for (const auto& ev : events) {
        flush_segment(ev.lambda);
        // splice out both children, splice in the parent at the left slot
        const int l = ev.left, r = ev.right;
        if (prev[r] >= 0) next[prev[r]] = next[r]; else head = next[r];
        if (next[r] >= 0) prev[next[r]] = prev[r];
        const int p = prev[l], n = next[l];
        prev[ev.id] = p;
        next[ev.id] = n;
        if (p >= 0) next[p] = ev.id; else head = ev.id;
        if (n >= 0) prev[n] = ev.id;
        node_stats[ev.id] = pool(node_stats[l], node_stats[r]);
        seg_start = ev.lambda;
    }
    flush_segment(std::numeric_limits<double>::infinity());
    return errors;
}

std::vector<double> cv_error_curve_naive(const FusionTree& tree,
                                         const TestSet& test,
                                         const LambdaGrid& grid) {
    for (int g : test.groups)
        if (g < 0 || g >= tree.k())
            throw DataError("test observation's group is absent from the tree");
    std::vector<double> errors(grid.size(), 0.0);
    for (int i = 0; i < grid.size(); ++i) {
        const double lambda = grid.values[i];
        double acc = 0.0;
        for (std::size_t t = 0; t < test.groups.size(); ++t) {
            const double r = test.values[t] - tree.beta_at(test.groups[t], lambda);
            acc += r * r;
        }
        errors[i] = acc;
    }
    return errors;
}

CvReport cross_validate(const Dataset& data, int feature, const WeightScheme& scheme,
                        int folds, const LambdaGrid& grid, std::uint64_t seed,
                        CvMode mode, int threads) {
    if (folds < 2) throw DataError("folds must be >= 2");
    const auto splits = split_folds(data, folds, seed);

    auto fold_curve = [&](const FoldSplit& split) {
        GroupStats train_stats = summarize_subset(data, feature, split.train);
        FusionTree tree = fit_univariate(train_stats, data.group_labels, scheme);
        TestSet test;
        test.groups.reserve(split.test.size());
        test.values.reserve(split.test.size());
        for (int i : split.test) {
            test.groups.push_back(data.group_of[i]);
            test.values.push_back(data.columns[feature][i]);
        }
        return mode == CvMode::Embedded ? cv_error_curve_embedded(tree, test, grid)
                                        : cv_error_curve_naive(tree, test, grid);
    };

    std::vector<std::vector<double>> curves(folds);
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads > 1 && folds > 1) {
        std::vector<std::future<std::vector<double>>> jobs;
        for (int f = 0; f < folds; ++f)
            jobs.push_back(std::async(std::launch::async, fold_curve, splits[f]));
        for (int f = 0; f < folds; ++f) curves[f] = jobs[f].get();
    } else {
        for (int f = 0; f < folds; ++f) curves[f] = fold_curve(splits[f]);
    }

    CvReport report;
    report.grid = grid;
    report.folds = folds;
    const int L = grid.size();
    report.mean_error.assign(L, 0.0);
    report.std_error.assign(L, 0.0);
    for (int i = 0; i < L; ++i) {
        double sum = 0.0;
        for (int f = 0; f < folds; ++f) sum += curves[f][i];
        const double mean = sum / folds;
        double ss = 0.0;
        for (int f = 0; f < folds; ++f) {
            const double d = curves[f][i] - mean;
            ss += d * d;
        }
        report.mean_error[i] = mean;
        report.std_error[i] =
            folds > 1 ? std::sqrt(ss / (folds - 1)) / std::sqrt(static_cast<double>(folds))
                      : 0.0;
    }
    report.best_index = static_cast<int>(
        std::min_element(report.mean_error.begin(), report.mean_error.end()) -
        report.mean_error.begin());
    report.best_lambda = grid.values[report.best_index];

    FusionTree full = fit_univariate(summarize(data, feature), data.group_labels, scheme);
    report.n_clusters.resize(L);
    for (int i = 0; i < L; ++i)
        report.n_clusters[i] = full.cut(grid.values[i]).num_clusters;
    return report;
}

CvReport cross_validate(const Dataset& data, int feature, const WeightScheme& scheme,
                        int folds, int grid_size, std::uint64_t seed, CvMode mode,
                        int threads) {
    FusionTree full = fit_univariate(summarize(data, feature), data.group_labels, scheme);
    return cross_validate(data, feature, scheme, folds, make_grid(full, grid_size),
                          seed, mode, threads);
}

}  // namespace fusetree
