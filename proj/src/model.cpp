#include "fusetree/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <random>
#include <unordered_map>

#include "fusetree/errors.hpp"

namespace fusetree {

namespace {

// RFC 4180 record reader. Returns false at end of input.
bool read_record(std::istream& in, std::vector<std::string>& fields) {
    fields.clear();
    int c = in.get();
    if (c == EOF) return false;
    std::string field;
    bool quoted = false;
    while (true) {
        if (quoted) {
            if (c == EOF) throw DataError("unterminated quoted field");
            if (c == '"') {
                int next = in.get();
                if (next == '"') {
                    field.push_back('"');
                } else {
                    quoted = false;
                    c = next;
                    continue;
                }
            } else {
                field.push_back(static_cast<char>(c));
            }
        } else {
            if (c == '"' && field.empty()) {
                quoted = true;
            } else if (c == ',') {
                fields.push_back(std::move(field));
                field.clear();
            } else if (c == '\r') {
                // swallow, handled with the following '\n'
            } else if (c == '\n' || c == EOF) {
                fields.push_back(std::move(field));
                return true;
            } else {
                field.push_back(static_cast<char>(c));
            }
        }
        c = in.get();
    }
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& col) {
    double value = 0.0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        throw DataError("row " + std::to_string(row) + ": cannot parse '" + cell +
                        "' in column '" + col + "' as a number");
    if (!std::isfinite(value))
        throw DataError("row " + std::to_string(row) + ": non-finite value in column '" +
                        col + "'");
    return value;
}

}  // namespace

void Dataset::validate() const {
    std::vector<int> counts(k(), 0);
    for (int g : group_of) {
        if (g < 0 || g >= k()) throw DataError("group index out of range");
        ++counts[g];
    }
    for (int c : counts)
        if (c == 0) throw DataError("empty group");
    for (const auto& col : columns) {
        if (static_cast<int>(col.size()) != n())
            throw DataError("column length mismatch");
        for (double v : col)
            if (!std::isfinite(v)) throw DataError("non-finite value");
    }
}

Dataset ingest_csv(std::istream& in,
                   const std::vector<std::string>& value_columns,
                   const std::string& group_column) {
    std::vector<std::string> header;
    if (!read_record(in, header)) throw DataError("empty input");

    auto column_index = [&](const std::string& name) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw DataError("missing column '" + name + "'");
        return static_cast<std::size_t>(it - header.begin());
    };

    std::vector<std::size_t> value_idx;
    for (const auto& name : value_columns) value_idx.push_back(column_index(name));
    const std::size_t group_idx = column_index(group_column);

    Dataset data;
    data.columns.resize(value_columns.size());
    std::unordered_map<std::string, int> group_ids;

    std::vector<std::string> fields;
    std::size_t row = 1;  // header is row 1
    while (read_record(in, fields)) {
        ++row;
        if (fields.size() == 1 && fields[0].empty()) continue;  // trailing newline
        if (fields.size() != header.size())
            throw DataError("row " + std::to_string(row) + ": expected " +
                            std::to_string(header.size()) + " fields, got " +
                            std::to_string(fields.size()));
        for (std::size_t j = 0; j < value_idx.size(); ++j)
            data.columns[j].push_back(
                parse_cell(fields[value_idx[j]], row, value_columns[j]));
        const std::string& label = fields[group_idx];
        auto [it, inserted] = group_ids.emplace(label, static_cast<int>(data.group_labels.size()));
        if (inserted) data.group_labels.push_back(label);
        data.group_of.push_back(it->second);
    }
    if (data.group_of.empty()) throw DataError("no data rows");
    return data;
}

GroupStats summarize(const Dataset& data, int feature) {
    std::vector<int> all(data.n());
    std::iota(all.begin(), all.end(), 0);
    return summarize_subset(data, feature, all);
}

GroupStats summarize_subset(const Dataset& data, int feature,
                            const std::vector<int>& observations) {
    if (feature < 0 || feature >= data.p())
        throw DataError("feature index out of range");
    const auto& col = data.columns[feature];

    GroupStats stats;
    const int K = data.k();
    stats.size.assign(K, 0);
    stats.mean.assign(K, 0.0);
    stats.within_ss.assign(K, 0.0);

    // Two-pass: means first, then centered squares.
    std::vector<double> sums(K, 0.0);
    for (int i : observations) {
        ++stats.size[data.group_of[i]];
        sums[data.group_of[i]] += col[i];
    }
    for (int g = 0; g < K; ++g)
        if (stats.size[g] > 0) stats.mean[g] = sums[g] / static_cast<double>(stats.size[g]);
    for (int i : observations) {
        const double d = col[i] - stats.mean[data.group_of[i]];
        stats.within_ss[data.group_of[i]] += d * d;
    }
    stats.n_total = static_cast<std::int64_t>(observations.size());
    return stats;
}

std::vector<FoldSplit> split_folds(const Dataset& data, int folds, std::uint64_t seed) {
    if (folds < 2) throw DataError("folds must be >= 2");

    const int K = data.k();
    std::vector<std::vector<int>> members(K);
    for (int i = 0; i < data.n(); ++i) members[data.group_of[i]].push_back(i);

    std::vector<FoldSplit> splits(folds);
    for (int f = 0; f < folds; ++f) splits[f].fold_id = f;

    // Singleton groups are pinned to train everywhere; the rest are shuffled
    // within their group and dealt round-robin across test folds.
    std::vector<int> test_fold_of(data.n(), -1);
    std::mt19937_64 rng(seed);
    for (int g = 0; g < K; ++g) {
        auto& obs = members[g];
        if (obs.size() == 1) continue;
        std::shuffle(obs.begin(), obs.end(), rng);
        for (std::size_t j = 0; j < obs.size(); ++j)
            test_fold_of[obs[j]] = static_cast<int>(j % folds);
    }
    for (int i = 0; i < data.n(); ++i) {
        for (int f = 0; f < folds; ++f) {
            if (test_fold_of[i] == f)
                splits[f].test.push_back(i);
            else
                splits[f].train.push_back(i);
        }
    }
    return splits;
}

}  // namespace fusetree
