#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "ivgnn/axioms.hpp"
#include "ivgnn/cli.hpp"
#include "ivgnn/graph.hpp"
#include "ivgnn/interval.hpp"
#include "ivgnn/synth.hpp"
#include "ivgnn/train.hpp"

namespace py = pybind11;
using namespace ivgnn;

namespace {

using Pair = std::pair<double, double>;

UnitInterval to_iv(const Pair& p) {
  const UnitInterval u{p.first, p.second};
  if (!is_valid(u)) throw std::invalid_argument("interval outside U: " + format_interval(u));
  return u;
}

Pair from_iv(const UnitInterval& u) { return {u.lo, u.hi}; }

py::dict stats_dict(const Dataset& ds) {
  const DatasetStats s = dataset_stats(ds);
  py::dict d;
  d["name"] = ds.name;
  d["size"] = s.size;
  d["classes"] = s.classes;
  d["avg_nodes"] = s.avg_nodes;
  d["tag_labels"] = s.tag_labels;
  d["feature_dim"] = ds.feature_dim;
  return d;
}

py::dict summary_dict(const VariantSummary& s) {
  py::dict d;
  d["variant"] = std::string(to_string(s.variant));
  d["mean"] = s.mean;
  d["std"] = s.std;
  d["best_epoch"] = s.best_epoch;
  d["mean_train_curve"] = s.mean_train_curve;
  d["mean_test_curve"] = s.mean_test_curve;
  return d;
}

}  // namespace

PYBIND11_MODULE(_ivgnn, m) {
  m.doc() = "Interval-valued graph neural network core";

  m.def("meet", [](const std::string& v, const Pair& a, const Pair& b) {
    return from_iv(meet(parse_aggregator(v), to_iv(a), to_iv(b)));
  });
  m.def("join", [](const std::string& v, const Pair& a, const Pair& b) {
    return from_iv(join(parse_aggregator(v), to_iv(a), to_iv(b)));
  });
  m.def("agr", [](const std::string& v, const std::vector<Pair>& items) {
    std::vector<UnitInterval> xs;
    for (const auto& p : items) xs.push_back(to_iv(p));
    return from_iv(agr<double>(parse_aggregator(v), xs));
  });
  m.def("leq_new", [](const Pair& a, const Pair& b) { return leq_new(to_iv(a), to_iv(b)); });
  m.def("check_axioms", [](const std::string& v, double step) {
    return format_report(check_axioms(parse_aggregator(v), step));
  }, py::arg("variant"), py::arg("grid") = 0.05);

  py::class_<Dataset>(m, "Dataset")
      .def_property_readonly("name", [](const Dataset& d) { return d.name; })
      .def("__len__", &Dataset::size)
      .def("stats", &stats_dict)
      .def("labels", [](const Dataset& d) {
        std::vector<int> out;
        for (const auto& g : d.graphs) out.push_back(g.label);
        return out;
      })
      .def("save", [](const Dataset& d, const std::filesystem::path& dir) { return save_tu_dataset(d, dir); });

  m.def("synthetic", [](const std::string& rule, std::size_t size, std::uint64_t seed) {
    SynthConfig c;
    c.size = size;
    c.seed = seed;
    const bool density = parse_synth_rule(rule) == SynthRule::Density;
    Dataset ds = density ? build_synthetic1(c) : build_synthetic2(c);
    ds.name = density ? "SYNTHETIC_1" : "SYNTHETIC_2";
    return ds;
  }, py::arg("rule"), py::arg("size") = 200, py::arg("seed"));
  m.def("load_tu", [](const std::filesystem::path& p) { return load_tu_dataset(p); });
  m.def("intervalize", [](const Dataset& ds, const std::string& mode, std::uint64_t seed) {
    return intervalize_tags(ds, parse_interval_mode(mode), seed);
  });

  m.def("cross_validate",
        [](const Dataset& ds, const std::string& aggregator, std::uint64_t seed, std::size_t epochs,
           std::size_t folds, std::size_t hidden, std::size_t layers, std::size_t jobs) {
          ModelConfig mc;
          mc.aggregator = parse_aggregator(aggregator);
          mc.hidden_dim = hidden;
          mc.num_layers = layers;
          TrainConfig tc;
          tc.seed = seed;
          tc.epochs = epochs;
          tc.folds = folds;
          tc.jobs = jobs;
          py::gil_scoped_release release;
          const VariantSummary s = cross_validate(ds, mc, tc);
          py::gil_scoped_acquire acquire;
          return summary_dict(s);
        },
        py::arg("dataset"), py::arg("aggregator") = "agr_new", py::arg("seed"), py::arg("epochs") = 100,
        py::arg("folds") = 10, py::arg("hidden") = 32, py::arg("layers") = 5, py::arg("jobs") = 1);

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::dispatch(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  });
}
