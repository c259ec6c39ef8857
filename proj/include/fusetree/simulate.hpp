#pragma once

#include <cstdint>
#include <vector>

#include "fusetree/consensus.hpp"
#include "fusetree/model.hpp"
#include "fusetree/tree.hpp"
#include "fusetree/weights.hpp"

namespace fusetree {

enum class ScenarioKind { UnivariateFixedK, UnivariateLogK, Bivariate1, Bivariate2 };

struct SimScenario {
    ScenarioKind kind = ScenarioKind::UnivariateFixedK;
    std::int64_t n = 100;
    int k = 10;          // ignored for UnivariateLogK
    double log_coeff = 2.5;  // K = round(log_coeff * log n) for UnivariateLogK
    double sigma = 1.0;
    std::uint64_t seed = 42;

    void validate() const;
    int effective_k() const;
};

struct GroundTruth {
    Partition true_partition;
    std::vector<std::vector<double>> true_means;  // per feature, per group
};

// RNG is std::mt19937_64 seeded from the scenario; replicate r of a study uses
// seed + r, so replicates are independent and order-insensitive.
std::pair<Dataset, GroundTruth> generate(const SimScenario& scenario);

// Fraction of replicates whose fitted path contains the true partition:
// univariate scenarios scan every cut level, bivariate scenarios scan the
// consensus over both trees' event lambdas and interval midpoints.
double recovery_probability(const WeightScheme& scheme, const SimScenario& scenario,
                            int replicates, std::uint64_t seed, int threads = 0);

struct BenchRow {
    int k = 0;
    double median_seconds = 0.0;
};

// Median fit wall-clock on standard-normal data with one condition per group.
std::vector<BenchRow> run_benchmark(const std::vector<int>& sizes,
                                    const WeightScheme& scheme, int replicates,
                                    std::uint64_t seed);

}  // namespace fusetree
