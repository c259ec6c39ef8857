#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "fusetree/consensus.hpp"
#include "fusetree/cv.hpp"
#include "fusetree/errors.hpp"
#include "fusetree/model.hpp"
#include "fusetree/oracle.hpp"
#include "fusetree/path.hpp"
#include "fusetree/simulate.hpp"
#include "fusetree/tree.hpp"

namespace py = pybind11;
using namespace fusetree;

namespace {

WeightScheme scheme_from(const std::string& weights, double alpha, double gamma) {
    return WeightScheme::parse(weights, alpha, gamma);
}

Dataset dataset_from(const std::vector<std::vector<double>>& columns,
                     const std::vector<int>& group_of,
                     const std::vector<std::string>& group_labels) {
    Dataset data;
    data.columns = columns;
    data.group_of = group_of;
    data.group_labels = group_labels;
    data.validate();
    return data;
}

}  // namespace

PYBIND11_MODULE(_fusetree, m) {
    m.doc() = "Regularization paths for grouped-mean fusion";

    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
    py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
    py::register_exception<InternalError>(m, "InternalError", PyExc_RuntimeError);

    py::class_<Partition>(m, "Partition")
        .def(py::init<>())
        .def_readwrite("cluster_of", &Partition::cluster_of)
        .def_readwrite("num_clusters", &Partition::num_clusters)
        .def("canonicalize", &Partition::canonicalize)
        .def("__eq__", [](const Partition& a, const Partition& b) { return a == b; });

    py::class_<FusionTree>(m, "Tree")
        .def_property_readonly("k", &FusionTree::k)
        .def_property_readonly("n_total", &FusionTree::n_total)
        .def_property_readonly("root_lambda", &FusionTree::root_lambda)
        .def_property_readonly("grand_mean", &FusionTree::grand_mean)
        .def_property_readonly("event_lambdas",
                               [](const FusionTree& t) {
                                   std::vector<double> out;
                                   for (const auto& ev : t.events()) out.push_back(ev.lambda);
                                   return out;
                               })
        .def_property_readonly("labels",
                               [](const FusionTree& t) {
                                   std::vector<std::string> out;
                                   for (const auto& leaf : t.leaves()) out.push_back(leaf.label);
                                   return out;
                               })
        .def("beta_at", &FusionTree::beta_at, py::arg("group"), py::arg("lam"))
        .def("cut", &FusionTree::cut, py::arg("lam"))
        .def("cut_k",
             [](const FusionTree& t, int k) {
                 auto r = t.cut_k(k);
                 return py::make_tuple(r.partition, r.lambda_lo, r.lambda_hi, r.exact);
             },
             py::arg("clusters"))
        .def("to_json", &FusionTree::to_json)
        .def("to_newick", &FusionTree::to_newick)
        .def_static("from_json", &FusionTree::from_json, py::arg("doc"));

    m.def(
        "fit",
        [](const std::vector<double>& values, const std::vector<int>& group_of,
           const std::vector<std::string>& group_labels, const std::string& weights,
           double alpha, double gamma) {
            Dataset data = dataset_from({values}, group_of, group_labels);
            return fit_univariate(summarize(data, 0), data.group_labels,
                                  scheme_from(weights, alpha, gamma));
        },
        py::arg("values"), py::arg("group_of"), py::arg("group_labels"),
        py::arg("weights") = "default", py::arg("alpha") = 1.0, py::arg("gamma") = 1.0);

    m.def(
        "fit_multi",
        [](const std::vector<std::vector<double>>& columns, const std::vector<int>& group_of,
           const std::vector<std::string>& group_labels, const std::string& weights,
           double alpha, double gamma, int threads) {
            Dataset data = dataset_from(columns, group_of, group_labels);
            return fit_multivariate(data, scheme_from(weights, alpha, gamma), threads);
        },
        py::arg("columns"), py::arg("group_of"), py::arg("group_labels"),
        py::arg("weights") = "default", py::arg("alpha") = 1.0, py::arg("gamma") = 1.0,
        py::arg("threads") = 0);

    m.def(
        "consensus",
        [](const std::vector<FusionTree>& trees, double lam) {
            return consensus(trees, lam);
        },
        py::arg("trees"), py::arg("lam"));

    m.def("adjusted_rand_index", &adjusted_rand_index, py::arg("a"), py::arg("b"));

    m.def(
        "cross_validate",
        [](const std::vector<double>& values, const std::vector<int>& group_of,
           const std::vector<std::string>& group_labels, const std::string& weights,
           double alpha, double gamma, int folds, int grid_size, std::uint64_t seed,
           const std::string& mode, int threads) {
            Dataset data = dataset_from({values}, group_of, group_labels);
            CvReport r = cross_validate(data, 0, scheme_from(weights, alpha, gamma),
                                        folds, grid_size, seed,
                                        mode == "naive" ? CvMode::Naive : CvMode::Embedded,
                                        threads);
            py::dict out;
            out["lambda"] = r.grid.values;
            out["mean_error"] = r.mean_error;
            out["std_error"] = r.std_error;
            out["n_clusters"] = r.n_clusters;
            out["best_lambda"] = r.best_lambda;
            out["best_index"] = r.best_index;
            return out;
        },
        py::arg("values"), py::arg("group_of"), py::arg("group_labels"),
        py::arg("weights") = "adaptive", py::arg("alpha") = 1.0, py::arg("gamma") = 1.0,
        py::arg("folds") = 5, py::arg("grid_size") = 50, py::arg("seed") = 42,
        py::arg("mode") = "embedded", py::arg("threads") = 0);

    m.def(
        "recovery_probability",
        [](const std::string& scenario, std::int64_t n, int k, double sigma,
           const std::string& weights, double alpha, double gamma, int replicates,
           std::uint64_t seed, int threads) {
            ScenarioKind kind;
            if (scenario == "uni-fixed-k") kind = ScenarioKind::UnivariateFixedK;
            else if (scenario == "uni-log-k") kind = ScenarioKind::UnivariateLogK;
            else if (scenario == "bivariate1") kind = ScenarioKind::Bivariate1;
            else if (scenario == "bivariate2") kind = ScenarioKind::Bivariate2;
            else throw UsageError("unknown scenario: " + scenario);
            SimScenario sc{kind, n, k, 2.5, sigma, seed};
            return recovery_probability(scheme_from(weights, alpha, gamma), sc,
                                        replicates, seed, threads);
        },
        py::arg("scenario"), py::arg("n"), py::arg("k") = 10, py::arg("sigma") = 1.0,
        py::arg("weights") = "adaptive", py::arg("alpha") = 1.0, py::arg("gamma") = 1.0,
        py::arg("replicates") = 200, py::arg("seed") = 42, py::arg("threads") = 0);

    m.def(
        "solve_exact",
        [](const std::vector<std::int64_t>& sizes, const std::vector<double>& means,
           double lam, const std::string& weights, double alpha, double gamma) {
            GroupStats stats;
            stats.size = sizes;
            stats.mean = means;
            stats.within_ss.assign(sizes.size(), 0.0);
            for (std::int64_t s : sizes) stats.n_total += s;
            auto r = oracle::solve_exact(stats, scheme_from(weights, alpha, gamma), lam);
            return py::make_tuple(r.beta, r.objective);
        },
        py::arg("sizes"), py::arg("means"), py::arg("lam"),
        py::arg("weights") = "default", py::arg("alpha") = 1.0, py::arg("gamma") = 1.0);

    m.attr("__version__") = "1.0.0";
}
