#include <pthread.h>

#include <csignal>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "irispad/config.hpp"
#include "irispad/error.hpp"
#include "irispad/experiment.hpp"
#include "irispad/fixtures.hpp"
#include "irispad/mock_server.hpp"
#include "irispad/results_store.hpp"
#include "irispad/text_util.hpp"

namespace fs = std::filesystem;
using namespace irispad;

namespace {

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string output_dir;
};

ExperimentConfig resolve_config(const Globals& g, bool required) {
  ExperimentConfig cfg;
  if (!g.config.empty()) {
    cfg = load_config(g.config);
  } else if (required) {
    throw Error(ErrorCode::Config, "--config", "this subcommand needs a config file");
  }
  if (g.seed) cfg.seed = *g.seed;
  if (!g.output_dir.empty()) cfg.output_dir = g.output_dir;
  return cfg;
}

fs::path store_or_default(const std::string& store, const ExperimentConfig& cfg) {
  return store.empty() ? cfg.store_path() : fs::path(store);
}

fs::path output_dir(const Globals& g, const ExperimentConfig& cfg) {
  return g.output_dir.empty() ? cfg.output_dir : fs::path(g.output_dir);
}

std::string sanitize(std::string s) {
  for (auto& ch : s) {
    if (ch == '\n' || ch == '\r' || ch == '|') ch = ' ';
  }
  return s;
}

void print_failures(const std::vector<RunFailure>& failures) {
  for (const auto& f : failures) {
    std::cout << "failed | " << f.variant << " | " << f.sample_id << " | "
              << sanitize(f.error) << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Iris presentation-attack-detection evaluation harness"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "Experiment config (INI)");
  app.add_option("--seed", g.seed, "Override the config seed");
  app.add_option("--output-dir", g.output_dir, "Override the output directory");

  auto* ingest = app.add_subcommand("ingest", "Load and sample the dataset manifest");

  auto* run = app.add_subcommand("run", "Query the model for every variant and sample");
  std::optional<std::size_t> limit;
  std::optional<int> in_flight;
  run->add_option("--limit", limit, "Stop after this many new records");
  run->add_option("--max-in-flight", in_flight, "Override the in-flight bound");

  auto* score = app.add_subcommand("score", "Rate, MSE and histogram reports");
  std::string store;
  std::optional<int> bins;
  score->add_option("--store", store, "Results store (default: <output-dir>/results.txt)");
  score->add_option("--bins", bins, "Histogram bins");

  auto* mesh = app.add_subcommand("mesh", "Generate a MESH salience corpus");

  auto* curve = app.add_subcommand("curve", "Learning curve and convergence");
  std::optional<double> epsilon;
  curve->add_option("--store", store, "Results store");
  curve->add_option("--epsilon", epsilon, "Convergence tolerance");

  auto* stats = app.add_subcommand("stats", "Compare two results stores");
  std::string store_a;
  std::string store_b;
  std::string pairing = "per-sample";
  std::string stats_variant;
  stats->add_option("store_a", store_a, "First results store")->required();
  stats->add_option("store_b", store_b, "Second results store")->required();
  stats->add_option("--pairing", pairing, "per-sample or per-class")
      ->check(CLI::IsMember({"per-sample", "per-class"}));
  stats->add_option("--variant", stats_variant, "Restrict to one variant label");

  auto* embed = app.add_subcommand("embed", "Fuse embeddings and project to 2-D");
  std::string embeddings;
  std::string weights;
  std::optional<int> hidden_dim;
  std::optional<int> out_dim;
  embed->add_option("--embeddings", embeddings, "Embeddings CSV");
  embed->add_option("--weights", weights, "Fusion weights file (default: seeded random)");
  embed->add_option("--hidden-dim", hidden_dim, "Hidden width for random weights");
  embed->add_option("--output-dim", out_dim, "Output width for random weights");

  auto* mock = app.add_subcommand("mock-serve", "Serve a scripted mock endpoint");
  std::string script_path;
  int port = 0;
  std::string host = "127.0.0.1";
  mock->add_option("--script", script_path, "Mock script")->required();
  mock->add_option("--port", port, "Port (0 picks a free one)");
  mock->add_option("--host", host, "Bind address");

  auto* fixture = app.add_subcommand("make-fixture",
                                     "Write an offline dataset, corpora, mock script and config");
  std::string fixture_dir;
  std::string fixture_model = "gemini";
  std::string fixture_url = "http://127.0.0.1:8765";
  fixture->add_option("dir", fixture_dir, "Target directory")->required();
  fixture->add_option("--model", fixture_model, "Published rows to reproduce")
      ->check(CLI::IsMember({"gemini", "llama"}));
  fixture->add_option("--base-url", fixture_url, "Endpoint written into config.ini");
  std::size_t embed_per_class = 0;
  fixture->add_option("--embeddings-per-class", embed_per_class,
                      "Also write a mixed-signal embeddings.csv");

  CLI11_PARSE(app, argc, argv);

  try {
    if (ingest->parsed()) {
      auto cfg = resolve_config(g, true);
      auto report = cmd_ingest(cfg);
      for (auto c : kAllClasses) {
        std::cout << "class | " << to_string(c) << " | "
                  << report.available[class_index(c)] << " | "
                  << report.selected[class_index(c)] << "\n";
      }
      std::cout << "annotated | " << report.annotated_samples << "\n"
                << "manifest | " << report.output.string() << "\n";
    } else if (run->parsed()) {
      auto cfg = resolve_config(g, true);
      if (in_flight) cfg.endpoint.max_in_flight = *in_flight;
      auto summary = cmd_run(cfg, RunOptions{limit});
      print_failures(summary.failures);
      for (const auto& [kind, tokens] : summary.salience_tokens) {
        std::cout << "salience_tokens | " << to_string(kind) << " | "
                  << text::format_fixed(tokens, 1) << "\n";
      }
      std::cout << "run | written=" << summary.written
                << " | skipped=" << summary.skipped
                << " | failed=" << summary.failures.size()
                << " | interrupted=" << (summary.interrupted ? "yes" : "no")
                << " | store=" << summary.store.string() << "\n";
    } else if (score->parsed()) {
      auto cfg = resolve_config(g, false);
      auto report = cmd_score(store_or_default(store, cfg), output_dir(g, cfg),
                              bins.value_or(cfg.histogram_bins));
      std::cout << text::read_file(report.rates_csv);
    } else if (mesh->parsed()) {
      auto cfg = resolve_config(g, true);
      auto summary = cmd_mesh(cfg);
      print_failures(summary.failures);
      for (const auto& [cls, attempts] : summary.attempts) {
        std::cout << "mesh | " << to_string(cls) << " | attempts=" << attempts << "\n";
      }
      std::cout << "corpus | " << summary.output.string() << "\n";
      if (!summary.failures.empty()) return 1;
    } else if (curve->parsed()) {
      auto cfg = resolve_config(g, false);
      auto report = cmd_curve(store_or_default(store, cfg), output_dir(g, cfg),
                              cfg.seed, epsilon.value_or(cfg.curve_epsilon));
      const auto variants = enumerate_variants();
      for (const auto& [index, n0] : report.converged) {
        std::cout << "converged | " << variants[index].label() << " | "
                  << (n0 ? std::to_string(*n0) : std::string("not_converged")) << "\n";
      }
    } else if (stats->parsed()) {
      StatsOptions options;
      options.pairing = pairing == "per-class" ? Pairing::PerClass : Pairing::PerSample;
      if (!stats_variant.empty()) options.variant = parse_variant(stats_variant);
      for (const auto& r : cmd_stats(store_a, store_b, options)) {
        std::cout << format_stat_result(r) << "\n";
      }
    } else if (embed->parsed()) {
      auto cfg = resolve_config(g, false);
      fs::path input = embeddings.empty() ? cfg.embeddings_path : fs::path(embeddings);
      if (input.empty()) {
        throw Error(ErrorCode::Config, "--embeddings", "no embeddings file given");
      }
      std::optional<fs::path> w = cfg.weights_path;
      if (!weights.empty()) w = weights;
      auto report = cmd_embed(input, w, output_dir(g, cfg), cfg.seed,
                              hidden_dim.value_or(cfg.embed_hidden_dim),
                              out_dim.value_or(cfg.embed_output_dim));
      std::cout << report.summary_line() << "\n";
    } else if (mock->parsed()) {
      // blocked before the server threads exist so only sigwait sees them
      sigset_t stop_signals;
      sigemptyset(&stop_signals);
      sigaddset(&stop_signals, SIGINT);
      sigaddset(&stop_signals, SIGTERM);
      pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);
      MockServer server(MockScript::load(script_path), port, host);
      std::cout << "listening | " << server.base_url() << std::endl;
      int received = 0;
      sigwait(&stop_signals, &received);
      server.stop();
      std::cout << "served | " << server.total_requests() << "\n";
    } else if (fixture->parsed()) {
      auto setup = fixtures::write_mock_experiment(fixture_dir, fixture_model,
                                                   fixture_url, g.seed.value_or(0));
      if (embed_per_class > 0) {
        auto records = fixtures::mixed_signal_embeddings(embed_per_class, 1024, 1024,
                                                         g.seed.value_or(0));
        text::write_file(fs::path(fixture_dir) / "embeddings.csv",
                         format_embeddings(records));
      }
      std::cout << "samples | " << setup.manifest.samples.size() << "\n"
                << "script | " << setup.script_path.string() << "\n"
                << "config | " << setup.config_path.string() << "\n";
    }
  } catch (const Error& e) {
    std::cout.flush();
    std::cerr << "error | " << to_string(e.code()) << " | " << sanitize(e.subject())
              << " | " << sanitize(e.detail()) << std::endl;
    return 1;
  } catch (const std::exception& e) {
    std::cout.flush();
    std::cerr << "error | Internal | - | " << sanitize(e.what()) << std::endl;
    return 1;
  }
  return 0;
}
