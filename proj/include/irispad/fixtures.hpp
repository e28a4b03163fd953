#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>

#include "irispad/fusion.hpp"
#include "irispad/manifest.hpp"
#include "irispad/mock_server.hpp"
#include "irispad/prompt.hpp"

namespace irispad::fixtures {

/// Writes `counts[c]` placeholder image files per class under `dir/images`
/// plus `dir/manifest.csv`, and returns the loaded manifest.
Manifest write_synthetic_dataset(const std::filesystem::path& dir,
                                 std::span<const std::size_t> counts);

/// Deterministic human / llama_mesh / gemini_mesh corpora with one entry per
/// class, gemini entries roughly three times the length of llama entries.
SalienceLibrary synthetic_salience();

/// Writes the three corpora as `<dir>/salience_<kind>.txt`.
void write_synthetic_salience(const std::filesystem::path& dir);

struct Fraction {
  std::size_t errors = 0;
  std::size_t total = 0;
};

/// Largest denominator t <= max_total with some e/t within 0.0005 of
/// `rate`, so the fraction rounds to the rate at three decimals.
Fraction fraction_for_rate(double rate, std::size_t max_total);

struct ScriptOptions {
  /// Share of answered samples whose first reply carries no number.
  double noise_share = 0.1;
  std::uint64_t seed = 0;
};

/// Adds mock entries so that `variant` yields exactly `targets[c]` for every
/// class: `total` samples answer (of which `errors` land on the wrong side
/// of 0.5) and the remainder never produce a number. Confidences cluster at
/// the extremes 0.0/1.0 with a few intermediate values.
void script_variant(MockScript& script, const Manifest& manifest,
                    const Variant& variant, std::span<const Fraction> targets,
                    const ScriptOptions& options);

/// Fractions reproducing one model's published rate rows, per class,
/// bounded by the published test-set sizes.
std::array<Fraction, kClassCount> published_targets(std::string_view model,
                                                    const Variant& variant);

struct MockExperiment {
  Manifest manifest;
  MockScript script;
  std::filesystem::path config_path;
  std::filesystem::path script_path;
};

/// Complete offline setup for one model ("gemini" or "llama"): dataset with
/// the published test-set sizes, salience corpora, a mock script whose
/// replies reproduce that model's published rates for all eight variants,
/// and `config.ini` pointing at `base_url`.
MockExperiment write_mock_experiment(const std::filesystem::path& dir,
                                     std::string_view model,
                                     std::string_view base_url,
                                     std::uint64_t seed);

/// Labeled embeddings where the image half carries a weak class signal
/// buried in noise and the text half a strong one.
std::vector<EmbeddingRecord> mixed_signal_embeddings(std::size_t per_class,
                                                     std::size_t image_dim,
                                                     std::size_t text_dim,
                                                     std::uint64_t seed);

}  // namespace irispad::fixtures
