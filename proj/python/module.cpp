#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "canids/bayes.hpp"
#include "canids/error.hpp"
#include "canids/evalharness.hpp"
#include "canids/feature_importance.hpp"
#include "canids/featurize.hpp"
#include "canids/ranking.hpp"
#include "canids/scenario.hpp"

namespace py = pybind11;
using namespace canids;

namespace {

WindowSpec window_spec(std::optional<double> window_ms, std::optional<double> window_frames,
                       double label_threshold) {
  if (window_ms && window_frames) throw InvalidArgument("give window_ms or window_frames, not both");
  WindowSpec spec;
  if (window_frames) {
    spec.mode = WindowMode::FrameCount;
    spec.size = *window_frames;
  } else if (window_ms) {
    spec.size = *window_ms;
  }
  spec.label_threshold = label_threshold;
  return spec;
}

EdgeMode edge_mode(const std::string& text) {
  if (text == "simple") return EdgeMode::Simple;
  if (text == "multigraph") return EdgeMode::Multigraph;
  throw InvalidArgument("edge_mode must be 'simple' or 'multigraph'");
}

GraphFeatureOptions graph_options(double damping, const std::string& mode) {
  GraphFeatureOptions o;
  o.edge_mode = edge_mode(mode);
  o.pagerank.damping = damping;
  return o;
}

py::array_t<double> values_of(const FeatureMatrix& m) {
  py::array_t<double> out({m.rows(), m.cols()});
  auto v = out.mutable_unchecked<2>();
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) v(r, c) = m.at(r, c);
  return out;
}

FeatureMatrix matrix_from(py::array_t<double, py::array::c_style | py::array::forcecast> values,
                          const std::vector<int>& labels, std::vector<std::string> names) {
  if (values.ndim() != 2) throw InvalidArgument("values must be two-dimensional");
  const auto rows = static_cast<std::size_t>(values.shape(0));
  const auto cols = static_cast<std::size_t>(values.shape(1));
  if (names.empty())
    for (std::size_t c = 0; c < cols; ++c)
      names.emplace_back(c < kFeatureCount && cols == kFeatureCount ? std::string(kFeatureNames[c])
                                                                    : "f" + std::to_string(c));
  if (names.size() != cols) throw InvalidArgument("names do not match the column count");
  if (labels.size() != rows) throw InvalidArgument("labels do not match the row count");
  FeatureMatrix m(names);
  auto v = values.unchecked<2>();
  std::vector<double> row(cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) row[c] = v(r, c);
    if (labels[r] != 0 && labels[r] != 1) throw InvalidArgument("labels must be 0 or 1");
    m.add_row(row, static_cast<std::uint8_t>(labels[r]), r);
  }
  return m;
}

py::dict metrics_dict(const ConfusionMatrix& cm) {
  const Metrics m = metrics(cm);
  py::dict d;
  d["tp"] = cm.tp;
  d["fp"] = cm.fp;
  d["tn"] = cm.tn;
  d["fn"] = cm.fn;
  d["accuracy"] = m.accuracy;
  d["precision"] = m.precision;
  d["recall"] = m.recall;
  d["f1"] = m.f1;
  d["zero_division"] = m.zero_division;
  return d;
}

// Holder so pybind11's variant caster does not unpack the model.
struct PyModel {
  Model model;
};

py::dict prediction_dict(const Prediction& p) {
  py::dict d;
  d["label"] = static_cast<int>(p.label);
  d["posterior_att"] = p.posterior_att;
  d["log_score_att"] = p.log_score_att;
  d["log_score_attfr"] = p.log_score_attfr;
  return d;
}

}  // namespace

PYBIND11_MODULE(_canids, m) {
  m.doc() = "Graph-based naive Bayes intrusion detection for CAN traffic";

  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InvalidArgument& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  py::class_<FrameLog>(m, "FrameLog")
      .def("__len__", &FrameLog::size)
      .def_readonly("source", &FrameLog::source)
      .def_property_readonly("timestamps",
                             [](const FrameLog& log) {
                               std::vector<double> t;
                               t.reserve(log.size());
                               for (const auto& f : log.frames) t.push_back(f.timestamp);
                               return t;
                             })
      .def_property_readonly("ids",
                             [](const FrameLog& log) {
                               std::vector<std::uint32_t> ids;
                               ids.reserve(log.size());
                               for (const auto& f : log.frames) ids.push_back(f.can_id);
                               return ids;
                             })
      .def_property_readonly("injected",
                             [](const FrameLog& log) {
                               std::vector<bool> out;
                               out.reserve(log.size());
                               for (const auto& f : log.frames) out.push_back(f.label == Label::Injected);
                               return out;
                             })
      .def("to_csv", &to_dataset_csv);

  m.def("read_log", &read_log_file, py::arg("path"), "Read a dataset CSV or candump file.");
  m.def("parse_csv", [](const std::string& text) { return parse_dataset_csv_text(text); }, py::arg("text"));
  m.def("parse_candump", [](const std::string& text) { return parse_candump_text(text); }, py::arg("text"));

  m.def(
      "synth",
      [](std::optional<std::string> attack, std::optional<std::string> scenario, std::uint64_t seed) {
        if (attack && scenario) throw InvalidArgument("give attack or scenario, not both");
        if (scenario) return run_scenario(parse_scenario(*scenario));
        if (!attack) {
          Scenario s;
          s.baseline.seed = seed;
          return run_scenario(s);
        }
        if (*attack == "mixed") return run_scenario(mixed_scenario(seed));
        const auto kind = parse_attack_kind(*attack);
        if (!kind) throw InvalidArgument("unknown attack kind '" + *attack + "'");
        return run_scenario(single_attack_scenario(*kind, seed));
      },
      py::arg("attack") = py::none(), py::arg("scenario") = py::none(), py::arg("seed") = 7,
      "Synthetic capture: baseline only, one standard attack corpus, or a scenario JSON text.");

  m.def(
      "pagerank",
      [](const std::vector<std::uint32_t>& ids, double damping, const std::string& mode) {
        const auto g = MessageGraph::from_id_sequence(ids);
        PageRankOptions o;
        o.damping = damping;
        o.edge_mode = edge_mode(mode);
        const auto r = pagerank(g, o);
        py::dict out;
        for (std::size_t i = 0; i < g.vertex_count(); ++i) out[py::int_(g.ids()[i])] = r.scores[i];
        return out;
      },
      py::arg("ids"), py::arg("damping") = 1.0, py::arg("edge_mode") = "simple",
      "PageRank of the transition graph of an id sequence, keyed by id.");

  m.def(
      "graph_features",
      [](const std::vector<std::uint32_t>& ids, double damping, const std::string& mode) {
        const auto v = graph_features(MessageGraph::from_id_sequence(ids), graph_options(damping, mode));
        const auto vals = v.values();
        py::dict out;
        for (std::size_t i = 0; i < kFeatureCount; ++i) out[py::str(std::string(kFeatureNames[i]))] = vals[i];
        return out;
      },
      py::arg("ids"), py::arg("damping") = 1.0, py::arg("edge_mode") = "simple");

  m.attr("FEATURE_NAMES") = std::vector<std::string>(kFeatureNames.begin(), kFeatureNames.end());

  py::class_<FeatureMatrix>(m, "FeatureMatrix")
      .def(py::init(&matrix_from), py::arg("values"), py::arg("labels"),
           py::arg("names") = std::vector<std::string>{})
      .def("__len__", &FeatureMatrix::rows)
      .def_property_readonly("names", &FeatureMatrix::names)
      .def_property_readonly("labels",
                             [](const FeatureMatrix& fm) {
                               return std::vector<int>(fm.labels().begin(), fm.labels().end());
                             })
      .def_property_readonly("values", &values_of)
      .def("select", [](const FeatureMatrix& fm, const std::vector<std::string>& names) {
        return fm.select_columns(names);
      })
      .def("to_csv", [](const FeatureMatrix& fm) {
        std::ostringstream out;
        write_feature_csv(fm, out);
        return out.str();
      });

  m.def(
      "featurize",
      [](const FrameLog& log, std::optional<double> window_ms, std::optional<double> window_frames,
         double damping, const std::string& mode, double label_threshold) {
        return featurize_log(log, window_spec(window_ms, window_frames, label_threshold),
                             graph_options(damping, mode));
      },
      py::arg("log"), py::arg("window_ms") = py::none(), py::arg("window_frames") = py::none(),
      py::arg("damping") = 1.0, py::arg("edge_mode") = "simple", py::arg("label_threshold") = kAnyAttack,
      "One feature row per window (23 ms time windows unless told otherwise).");
  m.def("read_features", &read_feature_file, py::arg("path"));

  m.def(
      "correlation",
      [](const FeatureMatrix& fm) {
        const auto c = correlation_matrix(fm);
        py::array_t<double> out({c.size(), c.size()});
        auto v = out.mutable_unchecked<2>();
        for (std::size_t i = 0; i < c.size(); ++i)
          for (std::size_t j = 0; j < c.size(); ++j) v(i, j) = c.at(i, j);
        return py::make_tuple(c.names(), out);
      },
      py::arg("matrix"), "Pearson matrix over the features plus the label (last).");
  m.def(
      "select_features",
      [](const FeatureMatrix& fm, std::size_t k) { return select_features(correlation_matrix(fm), k); },
      py::arg("matrix"), py::arg("k") = 4);
  m.def("quantile_transform", &quantile_transform, py::arg("matrix"));

  py::class_<PyModel>(m, "Model")
      .def_property_readonly("kind",
                             [](const PyModel& p) { return std::string(to_string(kind_of(p.model))); })
      .def_property_readonly("features", [](const PyModel& p) { return feature_names(p.model); })
      .def("predict",
           [](const PyModel& p, const std::vector<double>& x) { return prediction_dict(predict(p.model, x)); })
      .def("predict_all",
           [](const PyModel& p, const FeatureMatrix& fm) {
             std::vector<int> labels;
             std::vector<double> posterior;
             for (const auto& pr : predict_all(p.model, fm)) {
               labels.push_back(static_cast<int>(pr.label));
               posterior.push_back(pr.posterior_att);
             }
             return py::make_tuple(labels, posterior);
           })
      .def("importance",
           [](const PyModel& p, const FeatureMatrix& fm, std::size_t repeats, std::uint64_t seed) {
             return feature_importance(p.model, fm, repeats, seed);
           },
           py::arg("matrix"), py::arg("repeats") = 10, py::arg("seed") = 7)
      .def("to_string", [](const PyModel& p) { return model_to_string(p.model); })
      .def_static("from_string", [](const std::string& text) { return PyModel{model_from_string(text)}; });

  m.def(
      "fit",
      [](const FeatureMatrix& fm, const std::string& kind) {
        return PyModel{fit_model(parse_model_kind(kind), fm)};
      },
      py::arg("matrix"), py::arg("model") = "ggnb");

  m.def(
      "evaluate",
      [](const FeatureMatrix& fm, const std::string& kind, std::uint64_t seed, double split,
         const std::string& features, bool stratified) {
        const auto r = evaluate(parse_model_kind(kind), fm, SplitSpec{split, seed, stratified},
                                FeatureSelection::parse(features));
        py::dict out = metrics_dict(r.overall);
        out["model"] = std::string(to_string(r.model_kind));
        out["features"] = r.features;
        out["train_rows"] = r.train_rows;
        out["test_rows"] = r.test_rows;
        py::dict per;
        for (const auto& [kind_, cm] : r.per_attack) per[py::str(std::string(to_string(kind_)))] = metrics_dict(cm);
        out["per_attack"] = per;
        out["test_index"] = r.test_rows_index;
        std::vector<int> predicted;
        for (const auto& p : r.predictions) predicted.push_back(static_cast<int>(p.label));
        out["predicted"] = predicted;
        out["report"] = render_text(r);
        return out;
      },
      py::arg("matrix"), py::arg("model") = "ggnb", py::arg("seed") = 7, py::arg("split") = 0.67,
      py::arg("features") = "all", py::arg("stratified") = true);

  m.def(
      "sweep",
      [](const FrameLog& log, std::vector<double> grid, const std::string& kind, std::uint64_t seed) {
        if (grid.empty()) grid = default_sweep_grid();
        SplitSpec split;
        split.seed = seed;
        py::list rows;
        for (const auto& r : sensitivity_sweep(log, grid, parse_model_kind(kind), split)) {
          py::dict d;
          d["window_ms"] = r.window_ms;
          d["windows"] = r.windows;
          d["accuracy"] = r.accuracy;
          d["precision"] = r.precision;
          d["recall"] = r.recall;
          d["f1"] = r.f1;
          rows.append(d);
        }
        return rows;
      },
      py::arg("log"), py::arg("grid") = std::vector<double>{}, py::arg("model") = "ggnb", py::arg("seed") = 7);
}
