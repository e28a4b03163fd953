#include <doctest.h>

#include <random>

#include "irispad/error.hpp"
#include "irispad/fixtures.hpp"
#include "irispad/fusion.hpp"
#include "irispad/text_util.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace irispad;

namespace {

oracle::Matrix to_rows(const Eigen::MatrixXd& m) {
  oracle::Matrix out(static_cast<std::size_t>(m.rows()),
                     std::vector<double>(static_cast<std::size_t>(m.cols())));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j);
    }
  }
  return out;
}

std::vector<double> to_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

FusionWeights perturbed_weights(Eigen::Index in, Eigen::Index hidden, Eigen::Index out,
                                std::uint64_t seed) {
  auto w = FusionWeights::random(in, hidden, out, seed);
  std::mt19937_64 rng(seed + 1);
  std::normal_distribution<double> g(0.0, 0.2);
  for (Eigen::Index i = 0; i < hidden; ++i) {
    w.b1(i) = g(rng);
    w.norm_scale(i) = 1.0 + g(rng);
    w.norm_shift(i) = g(rng);
  }
  for (Eigen::Index i = 0; i < out; ++i) w.b2(i) = g(rng);
  return w;
}

double max_relative_error(const std::vector<double>& got, const std::vector<double>& want) {
  double worst = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    worst = std::max(worst, std::fabs(got[i] - want[i]) / std::max(1e-12, std::fabs(want[i])));
  }
  return worst;
}

oracle::Matrix blob(std::mt19937_64& rng, std::size_t n, double cx, double cy) {
  std::normal_distribution<double> g(0.0, 1.0);
  oracle::Matrix out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({cx + g(rng), cy + g(rng)});
  return out;
}

}  // namespace

TEST_CASE("gelu reference values") {
  CHECK(gelu(0.0) == 0.0);
  CHECK(std::fabs(gelu(1.0) - 0.841345) <= 1e-6);
  for (double x = -6.0; x <= 6.0; x += 0.25) {
    CHECK(gelu(x) == doctest::Approx(oracle::gelu(x)).epsilon(1e-12));
  }
  CHECK(std::fabs(gelu(-1.0) + 0.158655254) <= 1e-6);
}

TEST_CASE("fuse matches the naive double-loop reference") {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> g(0.0, 1.0);
  for (auto [image_dim, text_dim, hidden, out] :
       {std::array<int, 4>{3, 2, 4, 3}, std::array<int, 4>{64, 64, 32, 16},
        std::array<int, 4>{1024, 1024, 512, 512}}) {
    const auto w = perturbed_weights(image_dim + text_dim, hidden, out,
                                     static_cast<std::uint64_t>(image_dim));
    EmbeddingRecord r;
    r.sample_id = "s";
    for (int i = 0; i < image_dim; ++i) r.image_vec.push_back(g(rng));
    for (int i = 0; i < text_dim; ++i) r.text_vec.push_back(g(rng));
    const auto got = fuse(r, w);
    const auto want = oracle::fuse_naive(r.image_vec, r.text_vec, to_rows(w.w1), to_vec(w.b1),
                                         to_vec(w.norm_scale), to_vec(w.norm_shift),
                                         to_rows(w.w2), to_vec(w.b2));
    REQUIRE(got.size() == want.size());
    CHECK(max_relative_error(got, want) <= 1e-6);
  }
}

TEST_CASE("image features come first in the concatenation") {
  auto w = FusionWeights::random(3, 4, 2, 5);
  EmbeddingRecord a{"a", PresentationClass::Live, {1.0, 2.0}, {3.0}};
  EmbeddingRecord swapped{"b", PresentationClass::Live, {1.0}, {2.0, 3.0}};
  EmbeddingRecord reordered{"c", PresentationClass::Live, {3.0, 2.0}, {1.0}};
  CHECK(fuse(a, w) == fuse(swapped, w));
  CHECK(fuse(a, w) != fuse(reordered, w));
}

TEST_CASE("fuse and weights validation") {
  auto w = FusionWeights::random(4, 3, 2, 1);
  EmbeddingRecord r{"x", PresentationClass::Live, {1, 2}, {3}};
  CHECK_THROWS_CODE(fuse(r, w), ErrorCode::DimensionMismatch);
  w.b1.resize(2);
  CHECK_THROWS_CODE(w.validate(), ErrorCode::DimensionMismatch);
  auto w2 = FusionWeights::random(4, 3, 2, 1);
  w2.w2(0, 0) = std::nan("");
  CHECK_THROWS_CODE(w2.validate(), ErrorCode::InvalidArgument);
}

TEST_CASE("weights and embeddings files round trip") {
  const auto w = perturbed_weights(5, 4, 3, 12);
  const auto back = parse_weights(format_weights(w));
  CHECK(back.w1 == w.w1);
  CHECK(back.b1 == w.b1);
  CHECK(back.norm_scale == w.norm_scale);
  CHECK(back.norm_shift == w.norm_shift);
  CHECK(back.w2 == w.w2);
  CHECK(back.b2 == w.b2);
  CHECK_THROWS_CODE(parse_weights("fusion_weights 2 2 2\n1 2 3\n"), ErrorCode::MalformedRow);

  auto records = fixtures::mixed_signal_embeddings(2, 3, 2, 4);
  auto parsed = parse_embeddings(format_embeddings(records));
  REQUIRE(parsed.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(parsed[i].sample_id == records[i].sample_id);
    CHECK(parsed[i].cls == records[i].cls);
    CHECK(parsed[i].image_vec == records[i].image_vec);
    CHECK(parsed[i].text_vec == records[i].text_vec);
  }
  CHECK_THROWS_CODE(parse_embeddings("sample_id,class,2,1\na,live,1,2\n"),
                    ErrorCode::DimensionMismatch);
  CHECK_THROWS_CODE(parse_embeddings("sample_id,class,1,1\na,live,1,zz\n"),
                    ErrorCode::MalformedRow);
}

TEST_CASE("PCA explained variance matches analytic eigenvalues") {
  // axis-aligned fixture with known covariance diag(4, 1, 0.25) up to scale
  std::vector<std::vector<double>> pts;
  for (double sx : {-2.0, 2.0}) {
    for (double sy : {-1.0, 1.0}) {
      for (double sz : {-0.5, 0.5}) pts.push_back({sx, sy, sz});
    }
  }
  auto p = pca_project(pts, 3);
  const double total = 4.0 + 1.0 + 0.25;
  CHECK(std::fabs(p.explained_ratio[0] - 4.0 / total) <= 1e-9);
  CHECK(std::fabs(p.explained_ratio[1] - 1.0 / total) <= 1e-9);
  CHECK(std::fabs(p.explained_ratio[2] - 0.25 / total) <= 1e-9);
}

TEST_CASE("PCA agrees with a Jacobi eigensolver on random data") {
  std::mt19937_64 rng(55);
  std::normal_distribution<double> g(0.0, 1.0);
  oracle::Matrix pts;
  for (int i = 0; i < 40; ++i) {
    const double a = g(rng);
    const double b = g(rng);
    pts.push_back({a, 0.5 * a + 0.3 * b, g(rng) * 0.1, b - a});
  }
  auto ev = oracle::jacobi_eigenvalues(oracle::covariance(pts));
  double total = 0;
  for (double e : ev) total += e;
  auto p = pca_project(pts, 4);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(std::fabs(p.explained_ratio[k] - ev[k] / total) <= 1e-9);
  }
  // orthonormal basis and sign convention
  Eigen::MatrixXd gram = p.basis.transpose() * p.basis;
  CHECK((gram - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-9);
  for (Eigen::Index c = 0; c < p.basis.cols(); ++c) {
    Eigen::Index arg = 0;
    p.basis.col(c).cwiseAbs().maxCoeff(&arg);
    CHECK(p.basis(arg, c) > 0.0);
  }
  // projected variance equals the eigenvalue
  for (std::size_t k = 0; k < 4; ++k) {
    double mean = 0;
    for (const auto& s : p.scores) mean += s[k] / 40.0;
    double var = 0;
    for (const auto& s : p.scores) var += (s[k] - mean) * (s[k] - mean) / 39.0;
    CHECK(var == doctest::Approx(ev[k]).epsilon(1e-9));
  }
}

TEST_CASE("PCA error cases") {
  std::vector<std::vector<double>> same{{1, 2}, {1, 2}, {1, 2}};
  CHECK_THROWS_CODE(pca_project(same, 2), ErrorCode::DegenerateInput);
  std::vector<std::vector<double>> one{{1, 2}};
  CHECK_THROWS_CODE(pca_project(one, 1), ErrorCode::InvalidArgument);
  std::vector<std::vector<double>> ragged{{1, 2}, {1}};
  CHECK_THROWS_CODE(pca_project(ragged, 1), ErrorCode::DimensionMismatch);
  std::vector<std::vector<double>> ok{{1, 2}, {3, 5}};
  CHECK_THROWS_CODE(pca_project(ok, 3), ErrorCode::InvalidArgument);
}

TEST_CASE("silhouette matches the definition and separates distant blobs") {
  std::mt19937_64 rng(66);
  auto a = blob(rng, 20, 0.0, 0.0);
  auto b = blob(rng, 20, 10.0, 0.0);
  auto c = blob(rng, 5, 0.0, 10.0);
  oracle::Matrix pts(a);
  pts.insert(pts.end(), b.begin(), b.end());
  std::vector<int> labels(20, 0);
  labels.resize(40, 1);
  const double two = silhouette(pts, labels);
  CHECK(two > 0.8);
  CHECK(two == doctest::Approx(oracle::silhouette(pts, labels)).epsilon(1e-12));

  pts.insert(pts.end(), c.begin(), c.end());
  labels.resize(45, 2);
  CHECK(silhouette(pts, labels) == doctest::Approx(oracle::silhouette(pts, labels)).epsilon(1e-12));

  // translation invariance
  auto shifted = pts;
  for (auto& p : shifted) {
    p[0] += 123.0;
    p[1] -= 7.0;
  }
  CHECK(silhouette(shifted, labels) == doctest::Approx(silhouette(pts, labels)).epsilon(1e-12));
}

TEST_CASE("silhouette edge cases") {
  oracle::Matrix pts{{0, 0}, {1, 0}, {5, 5}};
  std::vector<int> single{1, 1, 1};
  CHECK_THROWS_CODE(silhouette(pts, single), ErrorCode::SingleCluster);
  std::vector<int> with_singleton{0, 0, 1};
  const double s = silhouette(pts, with_singleton);
  CHECK(s == doctest::Approx(oracle::silhouette(pts, with_singleton)));
  std::vector<int> short_labels{0, 1};
  CHECK_THROWS_CODE(silhouette(pts, short_labels), ErrorCode::DimensionMismatch);
}

TEST_CASE("fused embeddings separate classes better than image-only on the mixed fixture") {
  const auto records = fixtures::mixed_signal_embeddings(10, 1024, 1024, 0);
  const auto w = FusionWeights::random(kFusionInputDim, kFusionHiddenDim, 512, 17);
  std::vector<std::vector<double>> fused;
  std::vector<std::vector<double>> image;
  std::vector<PresentationClass> labels;
  for (const auto& r : records) {
    fused.push_back(fuse(r, w));
    image.push_back(r.image_vec);
    labels.push_back(r.cls);
  }
  const auto fp = pca_project(fused, 2);
  const auto ip = pca_project(image, 2);
  CHECK(silhouette(fp.scores, labels) > silhouette(ip.scores, labels));
  CHECK(silhouette(fused, labels) > silhouette(image, labels));
}
