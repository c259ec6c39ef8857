#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fusetree/consensus.hpp"
#include "fusetree/cv.hpp"
#include "fusetree/errors.hpp"
#include "fusetree/model.hpp"
#include "fusetree/oracle.hpp"
#include "fusetree/path.hpp"
#include "fusetree/simulate.hpp"
#include "fusetree/tree.hpp"

namespace {

using namespace fusetree;

constexpr const char* kToolVersion = "1.0.0";
constexpr int kSchemaVersion = 1;

// All floating-point output fixed at 12 significant digits so identical
// inputs produce byte-identical files.
std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("FUSETREE_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw UsageError("FUSETREE_SEED is not a valid integer: " + std::string(env));
        }
    }
    return 42;
}

struct WeightArgs {
    std::string scheme = "default";
    double alpha = 1.0;
    double gamma = 1.0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--weights", scheme, "Weight scheme: default, adaptive, casanova")
            ->check(CLI::IsMember({"default", "adaptive", "casanova"}));
        cmd->add_option("--alpha", alpha, "Adaptive weight decay rate");
        cmd->add_option("--gamma", gamma, "Adaptive weight gap exponent");
    }
    WeightScheme resolve() const { return WeightScheme::parse(scheme, alpha, gamma); }
};

Dataset load_csv(const std::string& path, const std::vector<std::string>& value_cols,
                 const std::string& group_col) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open input file: " + path);
    return ingest_csv(in, value_cols, group_col);
}

FusionTree load_tree(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open tree file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return FusionTree::from_json(buf.str());
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path);
    out << content;
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path);
    if (!file) throw DataError("cannot write file: " + path);
    return file;
}

std::string path_tsv(const FusionTree& tree) {
    std::vector<double> lambdas;
    for (const auto& ev : tree.events()) lambdas.push_back(ev.lambda);
    const double root = tree.root_lambda();
    for (int i = 0; i <= 200; ++i)
        lambdas.push_back(root * static_cast<double>(i) / 200.0);
    std::sort(lambdas.begin(), lambdas.end());
    lambdas.erase(std::unique(lambdas.begin(), lambdas.end()), lambdas.end());

    std::string out = "lambda\tgroup_label\tbeta\n";
    for (double lambda : lambdas)
        for (int g = 0; g < tree.k(); ++g)
            out += fmt(lambda) + "\t" + tree.leaves()[g].label + "\t" +
                   fmt(tree.beta_at(g, lambda)) + "\n";
    return out;
}

// Partition tables are CSV: header, then one (group_label, cluster_id) row.
void write_partition(std::ostream& out, const std::vector<std::string>& labels,
                     const Partition& part) {
    out << "group_label,cluster_id\n";
    for (std::size_t g = 0; g < labels.size(); ++g)
        out << labels[g] << "," << part.cluster_of[g] << "\n";
}

Partition read_partition(const std::string& path, std::vector<std::string>* labels_out) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open partition file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty partition file: " + path);
    Partition part;
    std::vector<std::string> labels;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto comma = line.rfind(',');
        if (comma == std::string::npos)
            throw DataError(path + ": row " + std::to_string(row) + " has no comma");
        labels.push_back(line.substr(0, comma));
        try {
            part.cluster_of.push_back(std::stoi(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw DataError(path + ": row " + std::to_string(row) +
                            " has a non-integer cluster id");
        }
    }
    for (int c : part.cluster_of)
        part.num_clusters = std::max(part.num_clusters, c + 1);
    if (labels_out) *labels_out = labels;
    return part;
}

std::string suffixed(const std::string& path, int feature, int p) {
    if (p == 1) return path;
    const auto dot = path.rfind('.');
    const std::string tag = ".f" + std::to_string(feature);
    if (dot == std::string::npos) return path + tag;
    return path.substr(0, dot) + tag + path.substr(dot);
}

// ---- subcommand bodies ----------------------------------------------------

int cmd_fit(const std::string& input, const std::vector<std::string>& value_cols,
            const std::string& group_col, const WeightArgs& weights,
            const std::string& output, const std::string& newick,
            const std::string& path_out, int threads) {
    Dataset data = load_csv(input, value_cols, group_col);
    auto trees = fit_multivariate(data, weights.resolve(), threads);
    for (int j = 0; j < data.p(); ++j) {
        write_file(suffixed(output, j, data.p()), trees[j].to_json());
        if (!newick.empty())
            write_file(suffixed(newick, j, data.p()), trees[j].to_newick());
        if (!path_out.empty())
            write_file(suffixed(path_out, j, data.p()), path_tsv(trees[j]));
    }
    return 0;
}

int cmd_cut(const std::string& tree_path, double lambda, int k_target,
            const std::string& output) {
    FusionTree tree = load_tree(tree_path);
    Partition part;
    if (k_target > 0) {
        auto cut = tree.cut_k(k_target);
        if (!cut.exact)
            std::cerr << "note: " << k_target << " clusters unreachable (tied events), "
                      << "returning " << cut.partition.num_clusters << " clusters\n";
        part = cut.partition;
    } else {
        part = tree.cut(lambda);
    }
    std::vector<std::string> labels;
    for (const auto& leaf : tree.leaves()) labels.push_back(leaf.label);
    std::ofstream file;
    write_partition(open_output(output, file), labels, part);
    return 0;
}

int cmd_cv(const std::string& input, const std::string& value_col,
           const std::string& group_col, const WeightArgs& weights, int folds,
           int grid_size, double lambda_min, double lambda_max,
           const std::string& mode, std::uint64_t seed, int threads,
           const std::string& output) {
    Dataset data = load_csv(input, {value_col}, group_col);
    const CvMode cv_mode = mode == "naive" ? CvMode::Naive : CvMode::Embedded;
    CvReport report;
    if (lambda_min > 0.0 || lambda_max > 0.0) {
        if (!(lambda_min > 0.0 && lambda_max > lambda_min))
            throw UsageError("--lambda-min/--lambda-max must satisfy 0 < min < max");
        report = cross_validate(data, 0, weights.resolve(), folds,
                                make_grid(lambda_min, lambda_max, grid_size), seed,
                                cv_mode, threads);
    } else {
        report = cross_validate(data, 0, weights.resolve(), folds, grid_size, seed,
                                cv_mode, threads);
    }
    std::ofstream file;
    std::ostream& out = open_output(output, file);
    out << "lambda\tmean_error\tstd_error\tn_clusters\n";
    for (int i = 0; i < report.grid.size(); ++i)
        out << fmt(report.grid.values[i]) << "\t" << fmt(report.mean_error[i]) << "\t"
            << fmt(report.std_error[i]) << "\t" << report.n_clusters[i] << "\n";
    std::cout << "{\"best_lambda\": " << fmt(report.best_lambda)
              << ", \"best_index\": " << report.best_index
              << ", \"folds\": " << report.folds << "}\n";
    return 0;
}

int cmd_aggregate(const std::vector<std::string>& tree_paths, double lambda,
                  const std::vector<double>& per_feature,
                  const std::string& output) {
    std::vector<FusionTree> trees;
    for (const auto& path : tree_paths) trees.push_back(load_tree(path));
    if (trees.empty()) throw UsageError("aggregate needs at least one --trees file");
    Partition part;
    if (!per_feature.empty()) {
        if (per_feature.size() != trees.size())
            throw UsageError("--per-feature-lambda needs one value per tree");
        part = consensus(trees, per_feature);
    } else {
        part = consensus(trees, lambda);
    }
    std::vector<std::string> labels;
    for (const auto& leaf : trees[0].leaves()) labels.push_back(leaf.label);
    std::ofstream file;
    write_partition(open_output(output, file), labels, part);
    return 0;
}

int cmd_ari(const std::string& a_path, const std::string& b_path) {
    std::vector<std::string> labels_a, labels_b;
    Partition a = read_partition(a_path, &labels_a);
    Partition b = read_partition(b_path, &labels_b);
    if (labels_a != labels_b) {
        // align b to a's label order
        std::map<std::string, int> where;
        for (std::size_t i = 0; i < labels_b.size(); ++i) where[labels_b[i]] = (int)i;
        std::vector<int> reordered;
        for (const auto& label : labels_a) {
            auto it = where.find(label);
            if (it == where.end())
                throw DataError("partitions disagree on group labels: " + label);
            reordered.push_back(b.cluster_of[it->second]);
        }
        b.cluster_of = std::move(reordered);
    }
    std::cout << fmt(adjusted_rand_index(a, b)) << "\n";
    return 0;
}

ScenarioKind parse_scenario(const std::string& name) {
    if (name == "uni-fixed-k") return ScenarioKind::UnivariateFixedK;
    if (name == "uni-log-k") return ScenarioKind::UnivariateLogK;
    if (name == "bivariate1") return ScenarioKind::Bivariate1;
    if (name == "bivariate2") return ScenarioKind::Bivariate2;
    throw UsageError("unknown scenario: " + name);
}

int cmd_simulate(const std::string& scenario, const std::vector<std::int64_t>& ns,
                 int k, double log_coeff, double sigma, const WeightArgs& weights,
                 int replicates, std::uint64_t seed, int threads,
                 const std::string& output) {
    const WeightScheme scheme = weights.resolve();
    std::ofstream file;
    std::ostream& out = open_output(output, file);
    out << "n\tscheme\trecovery_prob\treplicates\n";
    for (std::int64_t n : ns) {
        SimScenario sc{parse_scenario(scenario), n, k, log_coeff, sigma, seed};
        const double p = recovery_probability(scheme, sc, replicates, seed, threads);
        out << n << "\t" << scheme.name() << "\t" << fmt(p) << "\t" << replicates
            << "\n";
    }
    return 0;
}

int cmd_bench(const std::vector<int>& sizes, const WeightArgs& weights,
              int replicates, std::uint64_t seed, const std::string& output) {
    auto rows = run_benchmark(sizes, weights.resolve(), replicates, seed);
    std::ofstream file;
    std::ostream& out = open_output(output, file);
    out << "K\tmedian_seconds\n";
    for (const auto& row : rows) out << row.k << "\t" << fmt(row.median_seconds) << "\n";
    return 0;
}

int cmd_solve_exact(const std::string& input, const std::string& value_col,
                    const std::string& group_col, const WeightArgs& weights,
                    double lambda) {
    Dataset data = load_csv(input, {value_col}, group_col);
    GroupStats stats = summarize(data, 0);
    auto exact = oracle::solve_exact(stats, weights.resolve(), lambda);
    std::cout << "group_label\tbeta\n";
    for (int g = 0; g < data.k(); ++g)
        std::cout << data.group_labels[g] << "\t" << fmt(exact.beta[g]) << "\n";
    std::cout << "# objective " << fmt(exact.objective) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fusetree: regularization paths for grouped-mean fusion"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("fusetree ") + kToolVersion +
                                          " (tree schema v" +
                                          std::to_string(kSchemaVersion) + ")");

    int exit_code = 0;
    std::function<int()> run;

    // fit
    {
        auto* cmd = app.add_subcommand("fit", "Fit the fusion path and write tree artifacts");
        auto input = std::make_shared<std::string>();
        auto value_cols = std::make_shared<std::vector<std::string>>();
        auto group_col = std::make_shared<std::string>();
        auto weights = std::make_shared<WeightArgs>();
        auto output = std::make_shared<std::string>();
        auto newick = std::make_shared<std::string>();
        auto path_out = std::make_shared<std::string>();
        auto threads = std::make_shared<int>(0);
        cmd->add_option("--input", *input, "Input CSV")->required();
        cmd->add_option("--value-col", *value_cols, "Value column (repeat for several features)")
            ->required();
        cmd->add_option("--group-col", *group_col, "Grouping column")->required();
        weights->attach(cmd);
        cmd->add_option("--output", *output, "Output tree JSON")->required();
        cmd->add_option("--newick", *newick, "Also write Newick");
        cmd->add_option("--path-tsv", *path_out, "Also write the sampled path TSV");
        cmd->add_option("--threads", *threads, "Worker cap (0 = hardware)");
        cmd->callback([=, &run] {
            run = [=] {
                return cmd_fit(*input, *value_cols, *group_col, *weights, *output,
                               *newick, *path_out, *threads);
            };
        });
    }

    // cut
    {
        auto* cmd = app.add_subcommand("cut", "Cut a fitted tree into a partition");
        auto tree = std::make_shared<std::string>();
        auto lambda = std::make_shared<double>(-1.0);
        auto k_target = std::make_shared<int>(0);
        auto output = std::make_shared<std::string>();
        cmd->add_option("--tree", *tree, "Tree JSON from fit")->required();
        auto* lam = cmd->add_option("--lambda", *lambda, "Cut level");
        auto* kt = cmd->add_option("--k", *k_target, "Target cluster count");
        lam->excludes(kt);
        cmd->add_option("--output", *output, "Partition CSV (default stdout)");
        cmd->callback([=, &run] {
            run = [=] {
                if (*lambda < 0.0 && *k_target <= 0)
                    throw UsageError("cut needs --lambda or --k");
                return cmd_cut(*tree, *lambda, *k_target, *output);
            };
        });
    }

    // cv
    {
        auto* cmd = app.add_subcommand("cv", "Cross-validate the penalty level");
        auto input = std::make_shared<std::string>();
        auto value_col = std::make_shared<std::string>();
        auto group_col = std::make_shared<std::string>();
        auto weights = std::make_shared<WeightArgs>();
        auto folds = std::make_shared<int>(5);
        auto grid_size = std::make_shared<int>(50);
        auto lambda_min = std::make_shared<double>(0.0);
        auto lambda_max = std::make_shared<double>(0.0);
        auto mode = std::make_shared<std::string>("embedded");
        auto seed = std::make_shared<std::uint64_t>(default_seed());
        auto threads = std::make_shared<int>(0);
        auto output = std::make_shared<std::string>();
        cmd->add_option("--input", *input, "Input CSV")->required();
        cmd->add_option("--value-col", *value_col, "Value column")->required();
        cmd->add_option("--group-col", *group_col, "Grouping column")->required();
        weights->attach(cmd);
        cmd->add_option("--folds", *folds, "Number of folds");
        cmd->add_option("--grid-size", *grid_size, "Lambda grid size");
        cmd->add_option("--lambda-min", *lambda_min, "Grid lower bound (default: first event / 10)");
        cmd->add_option("--lambda-max", *lambda_max, "Grid upper bound (default: 1.05 * root)");
        cmd->add_option("--mode", *mode, "embedded or naive")
            ->check(CLI::IsMember({"embedded", "naive"}));
        cmd->add_option("--seed", *seed, "Fold-assignment seed");
        cmd->add_option("--threads", *threads, "Worker cap (0 = hardware)");
        cmd->add_option("--output", *output, "Curve TSV (default stdout)");
        cmd->callback([=, &run] {
            run = [=] {
                return cmd_cv(*input, *value_col, *group_col, *weights, *folds,
                              *grid_size, *lambda_min, *lambda_max, *mode, *seed,
                              *threads, *output);
            };
        });
    }

    // aggregate
    {
        auto* cmd = app.add_subcommand("aggregate",
                                       "Consensus partition across per-feature trees");
        auto trees = std::make_shared<std::vector<std::string>>();
        auto lambda = std::make_shared<double>(-1.0);
        auto per_feature = std::make_shared<std::vector<double>>();
        auto output = std::make_shared<std::string>();
        cmd->add_option("--trees", *trees, "Tree JSON files")->required();
        cmd->add_option("--lambda", *lambda, "Shared cut level");
        cmd->add_option("--per-feature-lambda", *per_feature, "One cut level per tree");
        cmd->add_option("--output", *output, "Partition CSV (default stdout)");
        cmd->callback([=, &run] {
            run = [=] {
                if (*lambda < 0.0 && per_feature->empty())
                    throw UsageError("aggregate needs --lambda or --per-feature-lambda");
                return cmd_aggregate(*trees, *lambda, *per_feature, *output);
            };
        });
    }

    // ari
    {
        auto* cmd = app.add_subcommand("ari", "Adjusted Rand index of two partitions");
        auto a = std::make_shared<std::string>();
        auto b = std::make_shared<std::string>();
        cmd->add_option("--a", *a, "Partition CSV")->required();
        cmd->add_option("--b", *b, "Partition CSV")->required();
        cmd->callback([=, &run] { run = [=] { return cmd_ari(*a, *b); }; });
    }

    // simulate
    {
        auto* cmd = app.add_subcommand("simulate", "Recovery-probability study");
        auto scenario = std::make_shared<std::string>("uni-fixed-k");
        auto ns = std::make_shared<std::vector<std::int64_t>>(std::vector<std::int64_t>{1000});
        auto k = std::make_shared<int>(10);
        auto log_coeff = std::make_shared<double>(2.5);
        auto sigma = std::make_shared<double>(1.0);
        auto weights = std::make_shared<WeightArgs>();
        auto replicates = std::make_shared<int>(200);
        auto seed = std::make_shared<std::uint64_t>(default_seed());
        auto threads = std::make_shared<int>(0);
        auto output = std::make_shared<std::string>();
        cmd->add_option("--scenario", *scenario,
                        "uni-fixed-k, uni-log-k, bivariate1, bivariate2")
            ->check(CLI::IsMember({"uni-fixed-k", "uni-log-k", "bivariate1", "bivariate2"}));
        cmd->add_option("--n", *ns, "Sample sizes (repeatable)");
        cmd->add_option("--k", *k, "Number of prior groups");
        cmd->add_option("--log-coeff", *log_coeff, "K = round(coeff * log n) for uni-log-k");
        cmd->add_option("--sigma", *sigma, "Noise level");
        weights->attach(cmd);
        cmd->add_option("--replicates", *replicates, "Monte Carlo replicates");
        cmd->add_option("--seed", *seed, "Base seed (replicate r uses seed + r)");
        cmd->add_option("--threads", *threads, "Worker cap (0 = hardware)");
        cmd->add_option("--output", *output, "Result TSV (default stdout)");
        cmd->callback([=, &run] {
            run = [=] {
                return cmd_simulate(*scenario, *ns, *k, *log_coeff, *sigma, *weights,
                                    *replicates, *seed, *threads, *output);
            };
        });
    }

    // bench
    {
        auto* cmd = app.add_subcommand("bench", "Fit-time benchmark");
        auto sizes = std::make_shared<std::vector<int>>(std::vector<int>{1000, 10000});
        auto weights = std::make_shared<WeightArgs>();
        auto replicates = std::make_shared<int>(5);
        auto seed = std::make_shared<std::uint64_t>(default_seed());
        auto output = std::make_shared<std::string>();
        cmd->add_option("--sizes", *sizes, "Group counts K (repeatable)");
        weights->attach(cmd);
        cmd->add_option("--replicates", *replicates, "Replicates per K (median reported)");
        cmd->add_option("--seed", *seed, "Data seed");
        cmd->add_option("--output", *output, "Timing TSV (default stdout)");
        cmd->callback([=, &run] {
            run = [=] { return cmd_bench(*sizes, *weights, *replicates, *seed, *output); };
        });
    }

    // dev
    {
        auto* dev = app.add_subcommand("dev", "Debugging utilities");
        dev->require_subcommand(1);
        auto* cmd = dev->add_subcommand("solve-exact",
                                        "Brute-force solution at one lambda (K <= 15)");
        auto input = std::make_shared<std::string>();
        auto value_col = std::make_shared<std::string>();
        auto group_col = std::make_shared<std::string>();
        auto weights = std::make_shared<WeightArgs>();
        auto lambda = std::make_shared<double>(0.0);
        cmd->add_option("--input", *input, "Input CSV")->required();
        cmd->add_option("--value-col", *value_col, "Value column")->required();
        cmd->add_option("--group-col", *group_col, "Grouping column")->required();
        weights->attach(cmd);
        cmd->add_option("--lambda", *lambda, "Penalty level")->required();
        cmd->callback([=, &run] {
            run = [=] {
                return cmd_solve_exact(*input, *value_col, *group_col, *weights, *lambda);
            };
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        exit_code = run();
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const InternalError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return exit_code;
}
