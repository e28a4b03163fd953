#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "irispad/client.hpp"
#include "irispad/config.hpp"
#include "irispad/mesh.hpp"
#include "irispad/scoring.hpp"
#include "irispad/stats.hpp"

namespace irispad {

struct IngestReport {
  Manifest sampled;
  std::array<std::size_t, kClassCount> available{};
  std::array<std::size_t, kClassCount> selected{};
  std::size_t annotated_samples = 0;
  std::filesystem::path output;
};

/// Loads and samples the manifest (and annotations when configured) and
/// writes `sampled_manifest.csv` to the output directory.
IngestReport cmd_ingest(const ExperimentConfig& cfg);

struct RunFailure {
  std::string variant;
  std::string sample_id;
  std::string error;
};

struct RunSummary {
  std::size_t written = 0;
  std::size_t skipped = 0;
  std::vector<RunFailure> failures;
  std::filesystem::path store;
  /// Mean token estimate of the injected entries per salience kind.
  std::map<SalienceKind, double> salience_tokens;
  bool interrupted = false;
};

struct RunOptions {
  /// Stop after this many new records (simulates an interrupted run).
  std::optional<std::size_t> limit;
};

/// Queries every (variant, sample) pair missing from the results store,
/// appending verdicts as they complete, then rewrites the store in canonical
/// order (variant, class, sample_id).
RunSummary cmd_run(const ExperimentConfig& cfg, ModelClient& client,
                   const RunOptions& options = {});

/// Same, against the configured HTTP endpoint.
RunSummary cmd_run(const ExperimentConfig& cfg, const RunOptions& options = {});

struct VariantScore {
  Variant variant;
  ClassErrorRates rates;
  double mse = 0.0;
  std::vector<HistogramBin> histogram;
  std::size_t verdicts = 0;
};

struct ScoreReport {
  std::vector<VariantScore> rows;
  std::filesystem::path rates_csv;
  std::filesystem::path counts_csv;
  std::filesystem::path histograms_csv;
  std::vector<std::filesystem::path> histogram_svgs;
};

/// Rate table (canonical class columns plus a 3-decimal MSE column), raw
/// counts, histogram CSV and one SVG per variant. Throws Error(EmptyStore)
/// for an empty store and Error(MissingClass) when a variant lacks a class.
ScoreReport cmd_score(const std::filesystem::path& store,
                      const std::filesystem::path& output_dir, int bins = 20);

struct MeshSummary {
  SalienceCorpus corpus;
  std::filesystem::path output;
  std::vector<RunFailure> failures;
  std::map<PresentationClass, int> attempts;
};

/// One MESH entry per configured class from that class's exemplar image.
MeshSummary cmd_mesh(const ExperimentConfig& cfg, ModelClient& client);
MeshSummary cmd_mesh(const ExperimentConfig& cfg);

struct CurveReport {
  std::map<std::size_t, LearningCurve> curves;  // by variant index
  std::map<std::size_t, std::optional<std::size_t>> converged;
  std::filesystem::path curve_csv;
  std::filesystem::path curve_svg;
};

CurveReport cmd_curve(const std::filesystem::path& store,
                      const std::filesystem::path& output_dir,
                      std::uint64_t seed, double epsilon = 0.05);

enum class Pairing { PerSample, PerClass };

struct StatsOptions {
  Pairing pairing = Pairing::PerSample;
  /// Restrict to one variant; empty compares all shared variants.
  std::optional<Variant> variant;
};

/// Signed-rank (paired) and rank-sum (unpaired) comparisons of two stores.
std::vector<StatResult> cmd_stats(const std::filesystem::path& store_a,
                                  const std::filesystem::path& store_b,
                                  const StatsOptions& options);

struct EmbedReport {
  double silhouette_fused = 0.0;
  double silhouette_image = 0.0;
  std::vector<double> explained_fused;
  std::vector<double> explained_image;
  std::filesystem::path coords_csv;
  std::filesystem::path fused_svg;
  std::filesystem::path image_svg;

  std::string summary_line() const;
};

/// Fuses every embedding, projects fused and image-only vectors to 2-D and
/// scores class separation of both projections.
EmbedReport cmd_embed(const std::filesystem::path& embeddings,
                      const std::optional<std::filesystem::path>& weights,
                      const std::filesystem::path& output_dir,
                      std::uint64_t seed, int hidden_dim = 512,
                      int output_dim = 512);

}  // namespace irispad
