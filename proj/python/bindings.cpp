#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <fstream>

#include "irispad/client.hpp"
#include "irispad/config.hpp"
#include "irispad/error.hpp"
#include "irispad/experiment.hpp"
#include "irispad/fixtures.hpp"
#include "irispad/fusion.hpp"
#include "irispad/mock_server.hpp"
#include "irispad/prompt.hpp"
#include "irispad/scoring.hpp"
#include "irispad/stats.hpp"

namespace py = pybind11;
namespace fs = std::filesystem;
using namespace irispad;

namespace {

MethodChoice parse_method(const std::string& name) {
  if (name == "auto") return MethodChoice::Auto;
  if (name == "exact") return MethodChoice::Exact;
  if (name == "normal") return MethodChoice::NormalApprox;
  throw Error(ErrorCode::InvalidArgument, name, "method must be auto, exact or normal");
}

py::dict stat_dict(const StatResult& r) {
  py::dict d;
  d["test"] = r.test;
  d["statistic"] = r.statistic;
  d["p_value"] = r.p_value;
  d["method"] = std::string(to_string(r.method));
  d["n"] = r.n;
  return d;
}

py::dict rates_dict(const ClassErrorRates& rates) {
  py::dict d;
  for (const auto& [cls, rate] : rates.rates) d[py::str(std::string(to_string(cls)))] = rate;
  return d;
}

SalienceLibrary load_library(const std::map<std::string, fs::path>& files) {
  SalienceLibrary library;
  for (const auto& [name, path] : files) {
    auto kind = parse_salience_kind(name);
    if (!kind || *kind == SalienceKind::None) {
      throw Error(ErrorCode::InvalidArgument, name, "unknown salience kind");
    }
    library[*kind] = load_salience_corpus(path);
  }
  return library;
}

std::vector<PresentationClass> class_list(const std::optional<std::vector<std::string>>& names) {
  if (!names) return {kAllClasses.begin(), kAllClasses.end()};
  std::vector<PresentationClass> out;
  for (const auto& n : *names) out.push_back(require_class(n));
  return out;
}

ExperimentConfig config_with_overrides(const fs::path& path,
                                       std::optional<std::uint64_t> seed,
                                       std::optional<fs::path> output_dir) {
  auto cfg = load_config(path);
  if (seed) cfg.seed = *seed;
  if (output_dir) cfg.output_dir = *output_dir;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_irispad, m) {
  m.doc() = "Iris presentation-attack-detection evaluation harness";

  static py::exception<Error> error_type(m, "IrispadError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object instance = py::reinterpret_borrow<py::object>(error_type.ptr())(e.what());
      instance.attr("code") = std::string(to_string(e.code()));
      instance.attr("subject") = e.subject();
      instance.attr("detail") = e.detail();
      PyErr_SetObject(error_type.ptr(), instance.ptr());
    }
  });

  m.def("classes", [] {
    std::vector<std::string> out;
    for (auto c : kAllClasses) out.emplace_back(to_string(c));
    return out;
  }, "Class tokens in canonical order.");

  m.def("variants", [] {
    std::vector<std::string> out;
    for (const auto& v : enumerate_variants()) out.push_back(v.label());
    return out;
  });

  m.def("render_short", &render_short);
  m.def("render_long", &render_long);
  m.def("render_variant",
        [](const std::string& label, const std::map<std::string, fs::path>& corpora,
           const std::optional<std::vector<std::string>>& classes) {
          return render_variant(parse_variant(label), load_library(corpora),
                                class_list(classes));
        },
        py::arg("label"), py::arg("corpora") = std::map<std::string, fs::path>{},
        py::arg("classes") = py::none());

  m.def("extract_confidence", &extract_confidence, py::arg("text"));

  m.def("aggregate_mse", [](const std::vector<double>& rates) {
    return aggregate_mse(ClassErrorRates::from_rates(rates)).value;
  }, py::arg("rates"), "MSE of eight per-class rates in canonical order.");

  m.def("error_rates",
        [](const std::vector<std::pair<std::string, double>>& verdicts, double threshold) {
          std::vector<Verdict> vs;
          for (std::size_t i = 0; i < verdicts.size(); ++i) {
            vs.push_back(make_verdict(std::to_string(i), require_class(verdicts[i].first),
                                      verdicts[i].second, threshold));
          }
          return rates_dict(error_rates(vs));
        },
        py::arg("verdicts"), py::arg("threshold") = kDefaultThreshold);

  m.def("wilcoxon",
        [](const std::vector<double>& x, const std::vector<double>& y,
           const std::string& method) {
          return stat_dict(wilcoxon_signed_rank(x, y, parse_method(method)));
        },
        py::arg("x"), py::arg("y"), py::arg("method") = "auto");

  m.def("mann_whitney",
        [](const std::vector<double>& a, const std::vector<double>& b,
           const std::string& method) {
          return stat_dict(mann_whitney_u(a, b, parse_method(method)));
        },
        py::arg("a"), py::arg("b"), py::arg("method") = "auto");

  m.def("gelu", &gelu);

  m.def("pca_project",
        [](const std::vector<std::vector<double>>& vectors, int k) {
          auto p = pca_project(vectors, k);
          return py::make_tuple(p.scores, p.explained_ratio);
        },
        py::arg("vectors"), py::arg("k") = 2);

  m.def("silhouette",
        [](const std::vector<std::vector<double>>& points, const std::vector<int>& labels) {
          return silhouette(points, labels);
        },
        py::arg("points"), py::arg("labels"));

  m.def("make_fixture",
        [](const fs::path& dir, const std::string& model, const std::string& base_url,
           std::uint64_t seed) {
          auto setup = fixtures::write_mock_experiment(dir, model, base_url, seed);
          return py::make_tuple(setup.config_path, setup.script_path);
        },
        py::arg("dir"), py::arg("model") = "gemini",
        py::arg("base_url") = "http://127.0.0.1:8765", py::arg("seed") = 0);

  m.def("write_mixed_embeddings",
        [](const fs::path& path, std::size_t per_class, std::size_t image_dim,
           std::size_t text_dim, std::uint64_t seed) {
          text_dim = text_dim == 0 ? image_dim : text_dim;
          auto records = fixtures::mixed_signal_embeddings(per_class, image_dim, text_dim, seed);
          std::ofstream(path) << format_embeddings(records);
        },
        py::arg("path"), py::arg("per_class"), py::arg("image_dim") = 64,
        py::arg("text_dim") = 0, py::arg("seed") = 0);

  m.def("run",
        [](const fs::path& config, std::optional<std::size_t> limit,
           std::optional<std::uint64_t> seed, std::optional<fs::path> output_dir) {
          auto cfg = config_with_overrides(config, seed, output_dir);
          RunSummary s;
          {
            py::gil_scoped_release release;
            s = cmd_run(cfg, RunOptions{limit});
          }
          py::dict d;
          d["written"] = s.written;
          d["skipped"] = s.skipped;
          d["failed"] = s.failures.size();
          d["interrupted"] = s.interrupted;
          d["store"] = s.store;
          return d;
        },
        py::arg("config"), py::arg("limit") = py::none(), py::arg("seed") = py::none(),
        py::arg("output_dir") = py::none());

  m.def("score",
        [](const fs::path& store, const fs::path& output_dir, int bins) {
          auto report = cmd_score(store, output_dir, bins);
          py::dict rows;
          for (const auto& row : report.rows) {
            py::dict r = rates_dict(row.rates);
            r["mse"] = row.mse;
            r["verdicts"] = row.verdicts;
            rows[py::str(row.variant.label())] = r;
          }
          return rows;
        },
        py::arg("store"), py::arg("output_dir"), py::arg("bins") = 20);

  m.def("curve",
        [](const fs::path& store, const fs::path& output_dir, std::uint64_t seed,
           double epsilon) {
          auto report = cmd_curve(store, output_dir, seed, epsilon);
          const auto labels = enumerate_variants();
          py::dict out;
          for (const auto& [index, n0] : report.converged) {
            out[py::str(labels[index].label())] = n0;
          }
          return out;
        },
        py::arg("store"), py::arg("output_dir"), py::arg("seed") = 0,
        py::arg("epsilon") = 0.05);

  m.def("stats",
        [](const fs::path& a, const fs::path& b, const std::string& pairing,
           const std::optional<std::string>& variant) {
          StatsOptions options;
          if (pairing == "per-class") {
            options.pairing = Pairing::PerClass;
          } else if (pairing != "per-sample") {
            throw Error(ErrorCode::InvalidArgument, pairing, "pairing must be per-sample or per-class");
          }
          if (variant) options.variant = parse_variant(*variant);
          py::list out;
          for (const auto& r : cmd_stats(a, b, options)) out.append(stat_dict(r));
          return out;
        },
        py::arg("store_a"), py::arg("store_b"), py::arg("pairing") = "per-sample",
        py::arg("variant") = py::none());

  m.def("embed",
        [](const fs::path& embeddings, std::optional<fs::path> weights,
           const fs::path& output_dir, std::uint64_t seed, int hidden, int out_dim) {
          auto r = cmd_embed(embeddings, weights, output_dir, seed, hidden, out_dim);
          py::dict d;
          d["silhouette_fused"] = r.silhouette_fused;
          d["silhouette_image"] = r.silhouette_image;
          d["explained_fused"] = r.explained_fused;
          d["explained_image"] = r.explained_image;
          d["summary"] = r.summary_line();
          return d;
        },
        py::arg("embeddings"), py::arg("weights") = py::none(), py::arg("output_dir"),
        py::arg("seed") = 0, py::arg("hidden_dim") = 512, py::arg("output_dim") = 512);

  py::class_<MockServer>(m, "MockServer")
      .def(py::init([](const fs::path& script, int port) {
             return std::make_unique<MockServer>(MockScript::load(script), port);
           }),
           py::arg("script"), py::arg("port") = 0)
      .def_property_readonly("port", &MockServer::port)
      .def_property_readonly("base_url", &MockServer::base_url)
      .def("total_requests", &MockServer::total_requests)
      .def("stop", &MockServer::stop)
      .def("__enter__", [](MockServer& s) -> MockServer& { return s; },
           py::return_value_policy::reference)
      .def("__exit__", [](MockServer& s, py::args) { s.stop(); });
}
