#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "irispad/client.hpp"
#include "irispad/prompt.hpp"

namespace irispad {

struct ExperimentConfig {
  std::filesystem::path manifest_path;
  std::filesystem::path annotations_path;
  std::map<SalienceKind, std::filesystem::path> salience_paths;
  std::map<PresentationClass, std::size_t> salience_selector;
  EndpointConfig endpoint;
  std::vector<Variant> variants = enumerate_variants();
  std::vector<PresentationClass> exemplar_classes{kAllClasses.begin(),
                                                  kAllClasses.end()};
  double threshold = 0.5;
  std::size_t sample_cap = 30;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "irispad_out";
  std::optional<std::filesystem::path> transcript_log;
  std::size_t context_limit = 128000;
  std::size_t image_token_allowance = 1000;
  int histogram_bins = 20;
  double curve_epsilon = 0.05;

  SalienceKind mesh_kind = SalienceKind::GeminiMesh;
  std::optional<std::filesystem::path> mesh_output;
  bool mesh_full_document = false;
  int mesh_max_attempts = 5;
  std::map<PresentationClass, std::string> mesh_exemplars;

  std::filesystem::path embeddings_path;
  std::optional<std::filesystem::path> weights_path;
  int embed_hidden_dim = 512;
  int embed_output_dim = 512;

  /// Throws Error(Config) naming the offending field.
  void validate() const;

  std::filesystem::path store_path() const { return output_dir / "results.txt"; }
};

/// INI-style file: `[section]` headers and `key = value` lines. Relative
/// paths are resolved against the file's directory; unknown keys are errors.
ExperimentConfig load_config(const std::filesystem::path& path);

ExperimentConfig parse_config(std::string_view content,
                              const std::filesystem::path& base_dir = {});

/// Comma-separated class tokens or "all".
std::vector<PresentationClass> parse_class_list(std::string_view value);

/// Comma-separated variant labels or "all".
std::vector<Variant> parse_variant_list(std::string_view value);

}  // namespace irispad
