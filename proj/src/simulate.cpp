#include "fusetree/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <random>
#include <thread>

#include "fusetree/errors.hpp"
#include "fusetree/path.hpp"

namespace fusetree {

namespace {

bool is_univariate(ScenarioKind kind) {
    return kind == ScenarioKind::UnivariateFixedK || kind == ScenarioKind::UnivariateLogK;
}

const std::vector<std::vector<double>>& class_means(ScenarioKind kind) {
    static const std::vector<std::vector<double>> one = {{1.0, 1.5}, {2.0, 1.5}, {3.0, 1.5}};
    static const std::vector<std::vector<double>> two = {{1.0, 1.0}, {1.0, 2.0}, {2.0, 1.0}};
    return kind == ScenarioKind::Bivariate1 ? one : two;
}

// Group sizes as multinomial(n, uniform) counts; all-positive by redraw.
std::vector<std::int64_t> draw_sizes(std::int64_t n, int k, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> group(0, k - 1);
    std::vector<std::int64_t> sizes(k);
    while (true) {
        std::fill(sizes.begin(), sizes.end(), 0);
        for (std::int64_t i = 0; i < n; ++i) ++sizes[group(rng)];
        if (std::all_of(sizes.begin(), sizes.end(), [](std::int64_t s) { return s > 0; }))
            return sizes;
    }
}

}  // namespace

void SimScenario::validate() const {
    if (sigma < 0) throw DataError("sigma must be >= 0");
    const int K = effective_k();
    if (K < 1 || n < K) throw DataError("need n >= K >= 1");
    if (is_univariate(kind) && K < 3)
        throw DataError("univariate scenarios need K >= 3 (three true classes)");
}

int SimScenario::effective_k() const {
    if (kind == ScenarioKind::UnivariateLogK)
        return static_cast<int>(std::lround(log_coeff * std::log(static_cast<double>(n))));
    return k;
}

std::pair<Dataset, GroundTruth> generate(const SimScenario& scenario) {
    scenario.validate();
    const int K = scenario.effective_k();
    std::mt19937_64 rng(scenario.seed);
    std::uniform_int_distribution<int> pick_class(0, 2);
    std::normal_distribution<double> noise(0.0, 1.0);

    std::vector<int> class_of(K);
    if (is_univariate(scenario.kind)) {
        // Redraw until all three classes occur, so the truth has 3 clusters.
        while (true) {
            std::vector<bool> seen(3, false);
            for (int g = 0; g < K; ++g) seen[class_of[g] = pick_class(rng)] = true;
            if (seen[0] && seen[1] && seen[2]) break;
        }
    } else {
        for (int g = 0; g < K; ++g) class_of[g] = pick_class(rng);
    }

    const int p = is_univariate(scenario.kind) ? 1 : 2;
    GroundTruth truth;
    truth.true_means.assign(p, std::vector<double>(K));
    for (int g = 0; g < K; ++g) {
        if (p == 1)
            truth.true_means[0][g] = static_cast<double>(class_of[g] + 1);
        else
            for (int j = 0; j < p; ++j)
                truth.true_means[j][g] = class_means(scenario.kind)[class_of[g]][j];
    }
    truth.true_partition.cluster_of = class_of;
    truth.true_partition.num_clusters = 3;
    truth.true_partition.canonicalize();

    const auto sizes = draw_sizes(scenario.n, K, rng);
    Dataset data;
    data.columns.assign(p, {});
    for (int g = 0; g < K; ++g) {
        data.group_labels.push_back("g" + std::to_string(g + 1));
        for (std::int64_t i = 0; i < sizes[g]; ++i) {
            data.group_of.push_back(g);
            for (int j = 0; j < p; ++j)
                data.columns[j].push_back(truth.true_means[j][g] +
                                          scenario.sigma * noise(rng));
        }
    }
    return {std::move(data), std::move(truth)};
}

namespace {

bool path_contains(const FusionTree& tree, const Partition& truth) {
    const int K = tree.k();
    for (int j = 0; j < K; ++j) {
        if (K - j != truth.num_clusters) continue;
        const double lo = j == 0 ? 0.0 : tree.events()[j - 1].lambda;
        const double hi = j == K - 1 ? std::numeric_limits<double>::infinity()
                                     : tree.events()[j].lambda;
        if (!(hi > lo)) continue;
        if (tree.cut(lo) == truth) return true;
    }
    return false;
}

bool consensus_contains(const std::vector<FusionTree>& trees, const Partition& truth) {
    // Consensus partitions only change at event lambdas; scan the union of
    // both trees' events plus interval midpoints.
    std::vector<double> candidates{0.0};
    for (const auto& t : trees)
        for (const auto& ev : t.events()) candidates.push_back(ev.lambda);
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    const std::size_t base = candidates.size();
    for (std::size_t i = 0; i + 1 < base; ++i)
        candidates.push_back(0.5 * (candidates[i] + candidates[i + 1]));
    for (double lambda : candidates)
        if (consensus(trees, lambda) == truth) return true;
    return false;
}

bool replicate_recovers(const WeightScheme& scheme, SimScenario scenario) {
    auto [data, truth] = generate(scenario);
    if (is_univariate(scenario.kind)) {
        FusionTree tree = fit_univariate(summarize(data, 0), data.group_labels, scheme);
        return path_contains(tree, truth.true_partition);
    }
    auto trees = fit_multivariate(data, scheme, 1);
    return consensus_contains(trees, truth.true_partition);
}

}  // namespace

double recovery_probability(const WeightScheme& scheme, const SimScenario& scenario,
                            int replicates, std::uint64_t seed, int threads) {
    if (replicates < 1) throw DataError("replicates must be >= 1");
    scenario.validate();
    auto run = [&](int r) {
        SimScenario rep = scenario;
        rep.seed = seed + static_cast<std::uint64_t>(r);
        return replicate_recovers(scheme, rep) ? 1 : 0;
    };
    int hits = 0;
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads > 1 && replicates > 1) {
        std::vector<std::future<int>> jobs;
        jobs.reserve(replicates);
        std::atomic<int> next{0};
        auto worker = [&]() {
            int local = 0;
            for (int r = next.fetch_add(1); r < replicates; r = next.fetch_add(1))
                local += run(r);
            return local;
        };
        const int workers = std::min(threads, replicates);
        for (int w = 0; w < workers; ++w)
            jobs.push_back(std::async(std::launch::async, worker));
        for (auto& job : jobs) hits += job.get();
    } else {
        for (int r = 0; r < replicates; ++r) hits += run(r);
    }
    return static_cast<double>(hits) / static_cast<double>(replicates);
}

std::vector<BenchRow> run_benchmark(const std::vector<int>& sizes,
                                    const WeightScheme& scheme, int replicates,
                                    std::uint64_t seed) {
    if (replicates < 1) throw DataError("replicates must be >= 1");
    std::vector<BenchRow> rows;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int K : sizes) {
        std::vector<double> times;
        for (int r = 0; r < replicates; ++r) {
            GroupStats stats;
            stats.size.assign(K, 1);
            stats.mean.resize(K);
            stats.within_ss.assign(K, 0.0);
            stats.n_total = K;
            for (int g = 0; g < K; ++g) stats.mean[g] = normal(rng);
            std::vector<std::string> labels(K);
            for (int g = 0; g < K; ++g) labels[g] = "g" + std::to_string(g + 1);
            const auto start = std::chrono::steady_clock::now();
            FusionTree tree = fit_univariate(stats, labels, scheme);
            const auto stop = std::chrono::steady_clock::now();
            if (static_cast<int>(tree.events().size()) != K - 1)
                throw InternalError("benchmark fit produced wrong event count");
            times.push_back(std::chrono::duration<double>(stop - start).count());
        }
        std::sort(times.begin(), times.end());
        rows.push_back({K, times[times.size() / 2]});
    }
    return rows;
}

}  // namespace fusetree
