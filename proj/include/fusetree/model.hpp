#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace fusetree {

// Observations with a prior grouping. Columns are stored per feature.
struct Dataset {
    std::vector<std::vector<double>> columns;  // p columns, each of length n
    std::vector<int> group_of;                 // n entries, values in [0, K)
    std::vector<std::string> group_labels;     // K labels, first-appearance order

    int n() const { return static_cast<int>(group_of.size()); }
    int p() const { return static_cast<int>(columns.size()); }
    int k() const { return static_cast<int>(group_labels.size()); }

    void validate() const;  // throws DataError on invariant violations
};

// Per-group sufficient statistics for one feature.
struct GroupStats {
    std::vector<std::int64_t> size;
    std::vector<double> mean;
    std::vector<double> within_ss;
    std::int64_t n_total = 0;

    int k() const { return static_cast<int>(size.size()); }
};

struct FoldSplit {
    std::vector<int> train;
    std::vector<int> test;
    int fold_id = 0;
};

Dataset ingest_csv(std::istream& in,
                   const std::vector<std::string>& value_columns,
                   const std::string& group_column);

GroupStats summarize(const Dataset& data, int feature);

// Statistics restricted to a subset of observations (used for CV folds).
// Groups absent from the subset get size 0.
GroupStats summarize_subset(const Dataset& data, int feature,
                            const std::vector<int>& observations);

std::vector<FoldSplit> split_folds(const Dataset& data, int folds,
                                   std::uint64_t seed);

}  // namespace fusetree
