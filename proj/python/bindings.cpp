// Copyright 2026 The spl-relabel Authors.
// SPDX-License-Identifier: Apache-2.0

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "spl/confusion.hpp"
#include "spl/corpus.hpp"
#include "spl/error.hpp"
#include "spl/io.hpp"
#include "spl/label_space.hpp"
#include "spl/metrics.hpp"
#include "spl/model.hpp"
#include "spl/pipeline.hpp"
#include "spl/relabel.hpp"
#include "spl/train.hpp"

namespace py = pybind11;
using namespace spl;

namespace {

// Json <-> Python ------------------------------------------------------------

py::object to_py(const Json& j) {
  switch (j.type()) {
    case Json::value_t::null: return py::none();
    case Json::value_t::boolean: return py::bool_(j.get<bool>());
    case Json::value_t::number_integer: return py::int_(j.get<std::int64_t>());
    case Json::value_t::number_unsigned: return py::int_(j.get<std::uint64_t>());
    case Json::value_t::number_float: return py::float_(j.get<double>());
    case Json::value_t::string: return py::str(j.get<std::string>());
    case Json::value_t::array: {
      py::list out;
      for (const auto& v : j) out.append(to_py(v));
      return std::move(out);
    }
    case Json::value_t::object: {
      py::dict out;
      for (const auto& [k, v] : j.items()) out[py::str(k)] = to_py(v);
      return std::move(out);
    }
    default: fail(ErrorKind::Internal, "unsupported JSON value");
  }
}

Json from_py(py::handle h) {
  if (h.is_none()) return nullptr;
  if (py::isinstance<py::bool_>(h)) return h.cast<bool>();
  if (py::isinstance<py::int_>(h)) {
    const auto v = h.cast<py::int_>();
    if (v < py::int_(0)) return v.cast<std::int64_t>();
    return v.cast<std::uint64_t>();
  }
  if (py::isinstance<py::float_>(h)) return h.cast<double>();
  if (py::isinstance<py::str>(h)) return h.cast<std::string>();
  if (py::isinstance<py::dict>(h)) {
    Json out = Json::object();
    for (const auto& [k, v] : h.cast<py::dict>()) out[py::str(k).cast<std::string>()] = from_py(v);
    return out;
  }
  if (py::isinstance<py::sequence>(h)) {
    Json out = Json::array();
    for (const auto& v : h.cast<py::sequence>()) out.push_back(from_py(v));
    return out;
  }
  fail(ErrorKind::InvalidArgument, "cannot convert " + py::repr(h).cast<std::string>() + " to JSON");
}

RecordSet records_in(const py::iterable& records) {
  RecordSet out;
  for (const auto& r : records) out.push_back(record_from_json(from_py(r)));
  return out;
}

py::list records_out(std::span<const ClipRecord> records) {
  py::list out;
  for (const auto& r : records) out.append(to_py(record_to_json(r)));
  return out;
}

ExperimentConfig config_in(const std::optional<py::dict>& cfg) {
  auto out = cfg ? experiment_config_from_json(from_py(*cfg)) : benchmark_config();
  out.validate();
  return out;
}

StrategyConfig strategy_in(const std::string& name, std::optional<std::size_t> k) {
  return StrategyConfig{parse_strategy(name), k};
}

Dataset dataset_in(const std::vector<std::vector<double>>& features, const std::vector<ClassId>& labels) {
  if (features.size() != labels.size()) fail(ErrorKind::DimensionMismatch, "features and labels differ in length");
  Dataset d;
  d.feature_dim = features.empty() ? 0 : features.front().size();
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].size() != d.feature_dim) fail(ErrorKind::DimensionMismatch, "ragged feature rows");
    d.add(features[i], labels[i]);
  }
  return d;
}

ScoreMatrix scores_in(const std::vector<std::vector<double>>& rows) {
  ScoreMatrix s;
  s.num_classes = rows.empty() ? 0 : rows.front().size();
  for (const auto& r : rows) {
    if (r.size() != s.num_classes) fail(ErrorKind::DimensionMismatch, "ragged score rows");
    s.scores.insert(s.scores.end(), r.begin(), r.end());
  }
  return s;
}

TrainConfig train_cfg(double lr, std::size_t epochs, std::size_t batch_size, std::uint64_t seed, bool shuffle) {
  TrainConfig c{lr, epochs, batch_size, seed, shuffle};
  c.validate();
  return c;
}

template <typename M>
void bind_model(py::class_<M>& cls) {
  cls.def("initialize", &M::initialize, py::arg("seed"))
      .def_property_readonly("num_classes", &M::num_classes)
      .def_property_readonly("feature_dim", &M::feature_dim)
      .def_property(
          "parameters", [](const M& m) { auto p = m.parameters(); return std::vector<double>(p.begin(), p.end()); },
          [](M& m, const std::vector<double>& values) {
            auto p = m.parameters();
            if (values.size() != p.size()) fail(ErrorKind::DimensionMismatch, "parameter count mismatch");
            std::copy(values.begin(), values.end(), p.begin());
          })
      .def("predict",
           [](const M& m, const std::vector<double>& x) {
             const auto p = predict(m, x);
             return py::make_tuple(p.label, p.probabilities);
           },
           py::arg("features"), "Returns (label, probabilities).")
      .def("loss",
           [](const M& m, const std::vector<std::vector<double>>& x, const std::vector<ClassId>& y) {
             return cross_entropy_loss(m, dataset_in(x, y));
           },
           py::arg("features"), py::arg("labels"))
      .def("gradient_check",
           [](const M& m, const std::vector<std::vector<double>>& x, const std::vector<ClassId>& y, double eps) {
             return gradient_check(m, dataset_in(x, y), eps);
           },
           py::arg("features"), py::arg("labels"), py::arg("epsilon") = 1e-5)
      .def("fit",
           [](M& m, const std::vector<std::vector<double>>& x, const std::vector<ClassId>& y, double lr,
              std::size_t epochs, std::size_t batch_size, std::uint64_t seed, bool shuffle) {
             const auto data = dataset_in(x, y);
             const auto cfg = train_cfg(lr, epochs, batch_size, seed, shuffle);
             py::gil_scoped_release release;
             return fit(m, data, cfg);
           },
           py::arg("features"), py::arg("labels"), py::arg("learning_rate") = 0.1, py::arg("epochs") = 10,
           py::arg("batch_size") = 32, py::arg("seed") = 0, py::arg("shuffle") = true,
           "Plain minibatch SGD. Returns the mean loss of every epoch.")
      .def("to_json", [](const M& m, std::uint64_t seed) { return to_py(checkpoint_to_json({m, seed, {}})); },
           py::arg("seed") = 0);
}

}  // namespace

PYBIND11_MODULE(_spl, m) {
  m.doc() = "Sub-pseudo-label relabeling, teacher/student training and evaluation";

  static py::exception<Error> spl_error(m, "SplError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(spl_error.ptr())(e.what());
      exc.attr("kind") = py::str(std::string(to_string(e.kind())));
      PyErr_SetObject(spl_error.ptr(), exc.ptr());
    }
  });

  // Confusion ---------------------------------------------------------------
  py::class_<ConfusionMatrix>(m, "ConfusionMatrix")
      .def(py::init([](std::size_t n, std::optional<std::vector<std::uint64_t>> counts) {
             return counts ? ConfusionMatrix(ClassCount(n), *counts) : ConfusionMatrix(ClassCount(n));
           }),
           py::arg("n"), py::arg("counts") = std::nullopt, "Row-major N*N counts, rows are weak labels.")
      .def_property_readonly("n", &ConfusionMatrix::size)
      .def("at", &ConfusionMatrix::at, py::arg("row"), py::arg("col"))
      .def("add", &ConfusionMatrix::add, py::arg("row"), py::arg("col"), py::arg("count") = 1)
      .def_property_readonly("total", &ConfusionMatrix::total)
      .def_property_readonly("diagonal_total", &ConfusionMatrix::diagonal_total)
      .def_property_readonly("counts",
                             [](const ConfusionMatrix& c) {
                               return std::vector<std::uint64_t>(c.counts().begin(), c.counts().end());
                             })
      .def("to_csv", &confusion_to_csv)
      .def_static("from_csv", [](const std::string& text) { return confusion_from_csv(text, "<csv>"); })
      .def("__eq__", [](const ConfusionMatrix& a, const ConfusionMatrix& b) { return a == b; })
      .def("__repr__", [](const ConfusionMatrix& c) {
        return "ConfusionMatrix(n=" + std::to_string(c.size()) + ", total=" + std::to_string(c.total()) + ")";
      });

  m.def("build_confusion",
        [](const py::iterable& records, std::size_t n) { return build_confusion(records_in(records), ClassCount(n)); },
        py::arg("records"), py::arg("n"), "Weak label x teacher prediction counts.");
  m.def("build_true_vs_weak",
        [](const py::iterable& records, std::size_t n) {
          return build_true_vs_weak(records_in(records), ClassCount(n));
        },
        py::arg("records"), py::arg("n"));
  m.def("noise_ratio", &noise_ratio, py::arg("confusion"));

  // Label spaces ------------------------------------------------------------
  py::class_<SplLabelSpace>(m, "LabelSpace")
      .def_property_readonly("strategy", [](const SplLabelSpace& s) { return std::string(strategy_name(s.strategy().kind)); })
      .def_property_readonly("k", [](const SplLabelSpace& s) { return s.strategy().k; })
      .def_property_readonly("n", [](const SplLabelSpace& s) { return s.n().value(); })
      .def_property_readonly("num_classes", &SplLabelSpace::num_classes)
      .def_property_readonly("scr", &SplLabelSpace::scr)
      .def_property_readonly("selected_count", &SplLabelSpace::selected_count)
      .def_property_readonly("discarded_count", &SplLabelSpace::discarded_count)
      .def_property_readonly("class_counts",
                             [](const SplLabelSpace& s) {
                               return std::vector<std::uint64_t>(s.class_counts().begin(), s.class_counts().end());
                             })
      .def("class_of", &SplLabelSpace::class_of, py::arg("weak"), py::arg("teacher"), "None for discarded cells.")
      .def("is_selected", &SplLabelSpace::is_selected, py::arg("weak"), py::arg("teacher"))
      .def("to_json", [](const SplLabelSpace& s) { return to_py(label_space_to_json(s)); })
      .def_static("from_json", [](const py::dict& j) { return label_space_from_json(from_py(j)); });

  m.def("assign_spl_full",
        [](std::size_t w, std::size_t t, std::size_t n) { return assign_spl_full(w, t, ClassCount(n)); },
        py::arg("weak"), py::arg("teacher"), py::arg("n"));
  m.def("build_label_space",
        [](const ConfusionMatrix& c, const std::string& strategy, std::optional<std::size_t> k) {
          return build_label_space(c, strategy_in(strategy, k));
        },
        py::arg("confusion"), py::arg("strategy"), py::arg("k") = std::nullopt,
        "strategy is one of spl, spl-m, spl-d, spl-b; k is the budget for spl-m and spl-d.");
  m.def("scr_curve",
        [](const ConfusionMatrix& c, const std::vector<std::size_t>& budgets, const std::string& strategy) {
          std::vector<py::tuple> out;
          for (const auto& p : scr_curve(c, budgets, parse_strategy(strategy))) {
            out.push_back(py::make_tuple(p.k, p.num_classes, p.scr));
          }
          return out;
        },
        py::arg("confusion"), py::arg("budgets"), py::arg("strategy") = "spl-m",
        "List of (k, num_classes, scr).");

  m.def("relabel",
        [](const py::iterable& records, const std::string& strategy, std::optional<std::size_t> n,
           std::optional<std::size_t> k, const SplLabelSpace* space) {
          const auto recs = records_in(records);
          const auto s = strategy_in(strategy, k);
          std::size_t classes = 0;
          if (space) {
            classes = space->n().value();
          } else if (n) {
            classes = *n;
          } else {
            for (const auto& r : recs) {
              classes = std::max<std::size_t>(classes, r.weak_label + 1);
              if (r.teacher_pred) classes = std::max<std::size_t>(classes, *r.teacher_pred + 1);
            }
          }
          if (is_spl(s.kind) && !space) {
            const auto built = build_label_space(build_confusion(recs, ClassCount(classes)), s);
            return records_out(relabel(recs, built));
          }
          return records_out(apply_strategy(recs, s, ClassCount(classes), space));
        },
        py::arg("records"), py::arg("strategy"), py::arg("n") = std::nullopt, py::arg("k") = std::nullopt,
        py::arg("space") = nullptr,
        "Assigns pseudo_label. SPL strategies build their space from the records unless one is given.");

  // Records -----------------------------------------------------------------
  m.def("records_to_jsonl", [](const py::iterable& r) { return records_to_jsonl(records_in(r)); }, py::arg("records"));
  m.def("records_from_jsonl", [](const std::string& text) { return records_out(records_from_jsonl(text, "<jsonl>")); },
        py::arg("text"));
  m.def("load_records", [](const std::string& path) { return records_out(load_records(path)); }, py::arg("path"));
  m.def("save_records", [](const std::string& path, const py::iterable& r) { save_records(path, records_in(r)); },
        py::arg("path"), py::arg("records"));

  // Simulation --------------------------------------------------------------
  m.def("generate_web_corpus",
        [](const std::optional<py::dict>& spec) {
          const auto s = corpus_spec_from_json(spec ? from_py(*spec) : Json::object());
          SyntheticCorpus c;
          {
            py::gil_scoped_release release;
            c = generate_web_corpus(s);
          }
          return records_out(c.records);
        },
        py::arg("spec") = std::nullopt, "spec uses the corpus-spec JSON keys; omitted keys take defaults.");
  m.def("corpus_spec_defaults", [] { return to_py(corpus_spec_to_json(CorpusSpec{})); });
  m.def("make_prototypes",
        [](std::size_t n, std::size_t d, double separation, std::uint64_t seed) {
          const auto p = make_prototypes(n, d, separation, seed);
          std::vector<std::vector<double>> out(p.rows);
          for (std::size_t r = 0; r < p.rows; ++r) {
            out[r].assign(p.values.begin() + static_cast<long>(r * p.cols),
                          p.values.begin() + static_cast<long>((r + 1) * p.cols));
          }
          return out;
        },
        py::arg("n"), py::arg("d"), py::arg("separation") = 1.0, py::arg("seed") = 0);

  // Models ------------------------------------------------------------------
  py::class_<LinearSoftmaxModel> lin(m, "LinearModel");
  lin.def(py::init<std::size_t, std::size_t>(), py::arg("num_classes"), py::arg("feature_dim"));
  bind_model(lin);
  py::class_<MlpModel> mlp(m, "MlpModel");
  mlp.def(py::init<std::size_t, std::size_t, std::size_t>(), py::arg("num_classes"), py::arg("feature_dim"),
          py::arg("hidden_width") = kDefaultHiddenWidth)
      .def_property_readonly("hidden_width", &MlpModel::hidden_width)
      .def("swap_head", [](const MlpModel& model, std::size_t c, std::uint64_t seed) { return swap_head(model, c, seed); },
           py::arg("num_classes"), py::arg("seed"));
  bind_model(mlp);

  // Metrics -----------------------------------------------------------------
  m.def("average_precision",
        [](const std::vector<std::vector<double>>& scores, const std::vector<ClassId>& labels, ClassId cls) {
          return average_precision(scores_in(scores), labels, cls);
        },
        py::arg("scores"), py::arg("labels"), py::arg("cls"));
  m.def("mean_average_precision",
        [](const std::vector<std::vector<double>>& scores, const std::vector<ClassId>& labels,
           std::optional<ClassId> background) {
          return mean_ap_excluding_background(scores_in(scores), labels, background);
        },
        py::arg("scores"), py::arg("labels"), py::arg("background") = std::nullopt);
  m.def("top_k_accuracy",
        [](const std::vector<std::vector<double>>& scores, const std::vector<ClassId>& labels, std::size_t k) {
          const auto s = scores_in(scores);
          if (s.num_records() != labels.size()) fail(ErrorKind::DimensionMismatch, "score rows do not match labels");
          RecordSet recs(labels.size());
          for (std::size_t i = 0; i < labels.size(); ++i) recs[i].true_label = labels[i];
          return top_k_accuracy(s, recs, k);
        },
        py::arg("scores"), py::arg("labels"), py::arg("k") = 1);

  // Pipeline ----------------------------------------------------------------
  m.def("benchmark_config", [] { return to_py(experiment_config_to_json(benchmark_config())); });
  m.def("run_experiment",
        [](const std::optional<py::dict>& cfg, std::uint64_t seed) {
          const auto c = config_in(cfg);
          RunResult r;
          {
            py::gil_scoped_release release;
            r = run_experiment(c, seed);
          }
          return to_py(run_result_to_json(r));
        },
        py::arg("config") = std::nullopt, py::arg("seed") = 1, "One run of config['strategy'].");
  m.def("compare_strategies",
        [](const std::optional<py::dict>& cfg, const std::optional<std::string>& artifact_dir) {
          const auto c = config_in(cfg);
          std::optional<std::filesystem::path> dir;
          if (artifact_dir) dir = *artifact_dir;
          ComparisonTable t;
          {
            py::gil_scoped_release release;
            t = compare_strategies(c, c.strategies, dir);
          }
          return to_py(comparison_to_json(c, t));
        },
        py::arg("config") = std::nullopt, py::arg("artifact_dir") = std::nullopt);
  m.def("sweep_scr",
        [](const std::optional<py::dict>& cfg, const std::string& strategy, const std::vector<std::size_t>& budgets) {
          const auto c = config_in(cfg);
          const auto kind = parse_strategy(strategy);
          std::vector<SweepRow> rows;
          {
            py::gil_scoped_release release;
            rows = sweep_scr(c, kind, budgets);
          }
          return to_py(sweep_to_json(c, kind, rows));
        },
        py::arg("config") = std::nullopt, py::arg("strategy") = "spl-m", py::arg("budgets") = std::vector<std::size_t>{2});
  m.def("dump_json", [](const py::object& v, int indent) { return dump_json(from_py(v), indent); }, py::arg("value"),
        py::arg("indent") = -1, "Serializes like the CLI reports (17 significant digits).");
}
