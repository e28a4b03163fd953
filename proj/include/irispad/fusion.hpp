#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "irispad/presentation_class.hpp"

namespace irispad {

struct EmbeddingRecord {
  std::string sample_id;
  PresentationClass cls = PresentationClass::Live;
  std::vector<double> image_vec;
  std::vector<double> text_vec;
};

/// Shallow fusion MLP: linear -> feature normalization (scale, shift) ->
/// exact GELU -> linear. Matrices are stored input-major, i.e. `w1` is
/// input_dim x hidden_dim and the forward pass computes w1^T x.
struct FusionWeights {
  Eigen::MatrixXd w1;
  Eigen::VectorXd b1;
  Eigen::VectorXd norm_scale;
  Eigen::VectorXd norm_shift;
  Eigen::MatrixXd w2;
  Eigen::VectorXd b2;

  Eigen::Index input_dim() const { return w1.rows(); }
  Eigen::Index hidden_dim() const { return w1.cols(); }
  Eigen::Index output_dim() const { return w2.cols(); }

  /// Throws Error(DimensionMismatch) or Error(InvalidArgument) for
  /// inconsistent shapes or non-finite entries.
  void validate() const;

  /// Gaussian weights scaled by 1/sqrt(fan_in), unit norm scale, zero
  /// biases and shift.
  static FusionWeights random(Eigen::Index input_dim, Eigen::Index hidden_dim,
                              Eigen::Index output_dim, std::uint64_t seed);
};

inline constexpr Eigen::Index kFusionInputDim = 2048;
inline constexpr Eigen::Index kFusionHiddenDim = 512;
inline constexpr double kNormEpsilon = 1e-5;

/// x * Phi(x) with the exact normal CDF.
double gelu(double x);

/// Fused representation; image features come first in the concatenation.
std::vector<double> fuse(const EmbeddingRecord& record, const FusionWeights& w);

struct Projection {
  std::vector<std::vector<double>> scores;
  std::vector<double> explained_ratio;
  /// Columns are the principal directions.
  Eigen::MatrixXd basis;
};

/// Covariance-eigendecomposition PCA onto the top `k` components. Each
/// component is signed so its largest-magnitude coordinate is positive.
Projection pca_project(const std::vector<std::vector<double>>& vectors,
                       int k = 2);

/// Mean silhouette with Euclidean distance; members of singleton clusters
/// score 0. Throws Error(SingleCluster) with fewer than two labels present.
double silhouette(const std::vector<std::vector<double>>& points,
                  std::span<const int> labels);

double silhouette(const std::vector<std::vector<double>>& points,
                  std::span<const PresentationClass> labels);

/// Header `sample_id,class,<image_dim>,<text_dim>` followed by one
/// `sample_id,class,v1,...` line per record.
std::vector<EmbeddingRecord> load_embeddings(const std::filesystem::path& path);
std::vector<EmbeddingRecord> parse_embeddings(std::string_view content);
std::string format_embeddings(const std::vector<EmbeddingRecord>& records);

/// Header `fusion_weights <input> <hidden> <output>`, then w1, b1,
/// norm_scale, norm_shift, w2, b2 as whitespace-separated row-major values.
FusionWeights load_weights(const std::filesystem::path& path);
FusionWeights parse_weights(std::string_view content);
std::string format_weights(const FusionWeights& w);

}  // namespace irispad
