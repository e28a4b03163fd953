#include "irispad/fusion.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <random>

#include "irispad/error.hpp"
#include "irispad/text_util.hpp"

namespace irispad {

namespace {

std::string dims(Eigen::Index rows, Eigen::Index cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

void require_len(const Eigen::VectorXd& v, Eigen::Index expected,
                 const char* name) {
  if (v.size() != expected) {
    throw Error(ErrorCode::DimensionMismatch, name,
                "expected " + std::to_string(expected) + ", got " +
                    std::to_string(v.size()));
  }
}

}  // namespace

void FusionWeights::validate() const {
  const auto hidden = hidden_dim();
  if (input_dim() == 0 || hidden == 0 || output_dim() == 0) {
    throw Error(ErrorCode::DimensionMismatch, "weights", "zero-sized layer");
  }
  require_len(b1, hidden, "b1");
  require_len(norm_scale, hidden, "norm_scale");
  require_len(norm_shift, hidden, "norm_shift");
  if (w2.rows() != hidden) {
    throw Error(ErrorCode::DimensionMismatch, "w2",
                "expected " + std::to_string(hidden) + " rows, got " +
                    dims(w2.rows(), w2.cols()));
  }
  require_len(b2, output_dim(), "b2");
  if (!w1.allFinite() || !b1.allFinite() || !norm_scale.allFinite() ||
      !norm_shift.allFinite() || !w2.allFinite() || !b2.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "weights", "non-finite entry");
  }
}

FusionWeights FusionWeights::random(Eigen::Index input_dim,
                                    Eigen::Index hidden_dim,
                                    Eigen::Index output_dim,
                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  FusionWeights w;
  const double s1 = 1.0 / std::sqrt(static_cast<double>(input_dim));
  const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
  w.w1 = Eigen::MatrixXd::NullaryExpr(input_dim, hidden_dim,
                                      [&] { return normal(rng) * s1; });
  w.b1 = Eigen::VectorXd::Zero(hidden_dim);
  w.norm_scale = Eigen::VectorXd::Ones(hidden_dim);
  w.norm_shift = Eigen::VectorXd::Zero(hidden_dim);
  w.w2 = Eigen::MatrixXd::NullaryExpr(hidden_dim, output_dim,
                                      [&] { return normal(rng) * s2; });
  w.b2 = Eigen::VectorXd::Zero(output_dim);
  return w;
}

double gelu(double x) { return 0.5 * x * std::erfc(-x / std::sqrt(2.0)); }

std::vector<double> fuse(const EmbeddingRecord& record, const FusionWeights& w) {
  const auto in = static_cast<Eigen::Index>(record.image_vec.size() +
                                            record.text_vec.size());
  if (in != w.input_dim()) {
    throw Error(ErrorCode::DimensionMismatch, record.sample_id,
                "embedding dims sum to " + std::to_string(in) +
                    ", weights expect " + std::to_string(w.input_dim()));
  }
  Eigen::VectorXd x(in);
  const auto image_dim = static_cast<Eigen::Index>(record.image_vec.size());
  x.head(image_dim) = Eigen::Map<const Eigen::VectorXd>(record.image_vec.data(), image_dim);
  x.tail(in - image_dim) = Eigen::Map<const Eigen::VectorXd>(
      record.text_vec.data(), in - image_dim);

  Eigen::VectorXd h = w.w1.transpose() * x + w.b1;
  const double mean = h.mean();
  const double variance = (h.array() - mean).square().mean();
  Eigen::ArrayXd normalized = (h.array() - mean) / std::sqrt(variance + kNormEpsilon);
  Eigen::VectorXd activated =
      (normalized * w.norm_scale.array() + w.norm_shift.array())
          .unaryExpr([](double v) { return gelu(v); })
          .matrix();
  Eigen::VectorXd out = w.w2.transpose() * activated + w.b2;
  return {out.data(), out.data() + out.size()};
}

Projection pca_project(const std::vector<std::vector<double>>& vectors, int k) {
  if (vectors.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "vectors", "need at least 2");
  }
  const auto dim = static_cast<Eigen::Index>(vectors.front().size());
  if (k < 1 || k > dim) {
    throw Error(ErrorCode::InvalidArgument, "k",
                "must be between 1 and the vector dimension");
  }
  const auto rows = static_cast<Eigen::Index>(vectors.size());
  Eigen::MatrixXd data(rows, dim);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& v = vectors[static_cast<std::size_t>(r)];
    if (static_cast<Eigen::Index>(v.size()) != dim) {
      throw Error(ErrorCode::DimensionMismatch, std::to_string(r),
                  "vectors must share one dimension");
    }
    data.row(r) = Eigen::Map<const Eigen::RowVectorXd>(v.data(), dim);
  }
  Eigen::MatrixXd centered = data.rowwise() - data.colwise().mean();
  Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(rows - 1);
  const double total = cov.trace();
  if (!(total > 0.0)) throw Error(ErrorCode::DegenerateInput, "vectors", "zero variance");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::DegenerateInput, "vectors", "eigendecomposition failed");
  }
  // eigenvalues come back ascending
  const auto& values = solver.eigenvalues();
  const auto& vecs = solver.eigenvectors();

  Projection out;
  out.basis.resize(dim, k);
  for (int c = 0; c < k; ++c) {
    const Eigen::Index src = dim - 1 - c;
    Eigen::VectorXd axis = vecs.col(src);
    Eigen::Index arg = 0;
    axis.cwiseAbs().maxCoeff(&arg);
    if (axis(arg) < 0.0) axis = -axis;
    out.basis.col(c) = axis;
    out.explained_ratio.push_back(std::max(0.0, values(src)) / total);
  }
  Eigen::MatrixXd scores = centered * out.basis;
  out.scores.reserve(static_cast<std::size_t>(rows));
  for (Eigen::Index r = 0; r < rows; ++r) {
    std::vector<double> row(static_cast<std::size_t>(k));
    for (int c = 0; c < k; ++c) row[static_cast<std::size_t>(c)] = scores(r, c);
    out.scores.push_back(std::move(row));
  }
  return out;
}

double silhouette(const std::vector<std::vector<double>>& points,
                  std::span<const int> labels) {
  if (points.size() != labels.size()) {
    throw Error(ErrorCode::DimensionMismatch, "labels",
                "one label per point required");
  }
  std::vector<int> distinct(labels.begin(), labels.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 2) throw Error(ErrorCode::SingleCluster, std::to_string(distinct.size()));

  std::vector<std::size_t> cluster(labels.size());
  std::vector<std::size_t> sizes(distinct.size(), 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    cluster[i] = static_cast<std::size_t>(
        std::lower_bound(distinct.begin(), distinct.end(), labels[i]) - distinct.begin());
    ++sizes[cluster[i]];
  }

  auto distance = [&](std::size_t i, std::size_t j) {
    const auto& p = points[i];
    const auto& q = points[j];
    double sum = 0.0;
    for (std::size_t d = 0; d < p.size(); ++d) {
      const double diff = p[d] - q[d];
      sum += diff * diff;
    }
    return std::sqrt(sum);
  };

  double total = 0.0;
  std::vector<double> sums(distinct.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (sizes[cluster[i]] == 1) continue;  // s = 0
    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (i != j) sums[cluster[j]] += distance(i, j);
    }
    const double a = sums[cluster[i]] / static_cast<double>(sizes[cluster[i]] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < distinct.size(); ++c) {
      if (c != cluster[i]) b = std::min(b, sums[c] / static_cast<double>(sizes[c]));
    }
    const double denom = std::max(a, b);
    if (denom > 0.0) total += (b - a) / denom;
  }
  return total / static_cast<double>(points.size());
}

double silhouette(const std::vector<std::vector<double>>& points,
                  std::span<const PresentationClass> labels) {
  std::vector<int> ids;
  ids.reserve(labels.size());
  for (auto c : labels) ids.push_back(static_cast<int>(class_index(c)));
  return silhouette(points, ids);
}

std::vector<EmbeddingRecord> parse_embeddings(std::string_view content) {
  std::vector<EmbeddingRecord> out;
  std::size_t line_no = 0;
  std::size_t image_dim = 0;
  std::size_t text_dim = 0;
  bool header = false;
  while (!content.empty()) {
    ++line_no;
    auto pos = content.find('\n');
    auto line = text::trim(content.substr(0, pos));
    content.remove_prefix(pos == std::string_view::npos ? content.size() : pos + 1);
    if (line.empty()) continue;
    const auto where = std::to_string(line_no);
    auto fields = text::split(line, ',');
    if (!header) {
      auto a = fields.size() == 4 ? text::parse_uint(fields[2]) : std::nullopt;
      auto b = fields.size() == 4 ? text::parse_uint(fields[3]) : std::nullopt;
      if (!a || !b || text::trim(fields[0]) != "sample_id" ||
          text::trim(fields[1]) != "class") {
        throw Error(ErrorCode::MalformedRow, where,
                    "expected header 'sample_id,class,<image_dim>,<text_dim>'");
      }
      image_dim = *a;
      text_dim = *b;
      header = true;
      continue;
    }
    if (fields.size() != 2 + image_dim + text_dim) {
      throw Error(ErrorCode::DimensionMismatch, where,
                  "expected " + std::to_string(image_dim + text_dim) + " values");
    }
    EmbeddingRecord rec;
    rec.sample_id = std::string(text::trim(fields[0]));
    rec.cls = require_class(text::trim(fields[1]));
    rec.image_vec.reserve(image_dim);
    rec.text_vec.reserve(text_dim);
    for (std::size_t i = 0; i < image_dim + text_dim; ++i) {
      auto v = text::parse_double(fields[2 + i]);
      if (!v) throw Error(ErrorCode::MalformedRow, where, "bad value");
      (i < image_dim ? rec.image_vec : rec.text_vec).push_back(*v);
    }
    out.push_back(std::move(rec));
  }
  if (!header) throw Error(ErrorCode::MalformedRow, "1", "missing header");
  return out;
}

std::vector<EmbeddingRecord> load_embeddings(const std::filesystem::path& path) {
  return parse_embeddings(text::read_file(path));
}

std::string format_embeddings(const std::vector<EmbeddingRecord>& records) {
  const std::size_t image_dim = records.empty() ? 0 : records.front().image_vec.size();
  const std::size_t text_dim = records.empty() ? 0 : records.front().text_vec.size();
  std::string out = "sample_id,class," + std::to_string(image_dim) + "," +
                    std::to_string(text_dim) + "\n";
  for (const auto& r : records) {
    out += r.sample_id;
    out += ',';
    out += to_string(r.cls);
    for (double v : r.image_vec) {
      out += ',';
      out += text::format_double(v);
    }
    for (double v : r.text_vec) {
      out += ',';
      out += text::format_double(v);
    }
    out += '\n';
  }
  return out;
}

namespace {

class NumberReader {
 public:
  explicit NumberReader(std::string_view s) : s_(s) {}

  double next() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ >= s_.size()) {
      throw Error(ErrorCode::MalformedRow, "weights", "unexpected end of data");
    }
    double v = 0;
    auto res = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
    if (res.ec != std::errc{}) {
      throw Error(ErrorCode::MalformedRow, "weights",
                  "bad number at byte " + std::to_string(pos_));
    }
    pos_ = static_cast<std::size_t>(res.ptr - s_.data());
    return v;
  }

  bool at_end() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    return pos_ >= s_.size();
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

void read_matrix(NumberReader& in, Eigen::MatrixXd& m, Eigen::Index rows,
                 Eigen::Index cols) {
  m.resize(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = in.next();
  }
}

void read_vector(NumberReader& in, Eigen::VectorXd& v, Eigen::Index n) {
  v.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = in.next();
}

void write_values(std::string& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c != 0) out += ' ';
      out += text::format_double(m(r, c));
    }
    out += '\n';
  }
}

}  // namespace

FusionWeights parse_weights(std::string_view content) {
  auto newline = content.find('\n');
  auto header = text::split(text::trim(content.substr(0, newline)), ' ');
  std::optional<std::uint64_t> in_dim, hidden, out_dim;
  if (header.size() == 4 && header[0] == "fusion_weights") {
    in_dim = text::parse_uint(header[1]);
    hidden = text::parse_uint(header[2]);
    out_dim = text::parse_uint(header[3]);
  }
  if (!in_dim || !hidden || !out_dim) {
    throw Error(ErrorCode::MalformedRow, "1",
                "expected 'fusion_weights <input> <hidden> <output>'");
  }
  NumberReader in(newline == std::string_view::npos ? std::string_view{}
                                                    : content.substr(newline + 1));
  FusionWeights w;
  const auto i = static_cast<Eigen::Index>(*in_dim);
  const auto h = static_cast<Eigen::Index>(*hidden);
  const auto o = static_cast<Eigen::Index>(*out_dim);
  read_matrix(in, w.w1, i, h);
  read_vector(in, w.b1, h);
  read_vector(in, w.norm_scale, h);
  read_vector(in, w.norm_shift, h);
  read_matrix(in, w.w2, h, o);
  read_vector(in, w.b2, o);
  if (!in.at_end()) {
    throw Error(ErrorCode::DimensionMismatch, "weights", "trailing values");
  }
  w.validate();
  return w;
}

FusionWeights load_weights(const std::filesystem::path& path) {
  return parse_weights(text::read_file(path));
}

std::string format_weights(const FusionWeights& w) {
  std::string out = "fusion_weights " + std::to_string(w.input_dim()) + " " +
                    std::to_string(w.hidden_dim()) + " " +
                    std::to_string(w.output_dim()) + "\n";
  write_values(out, w.w1);
  write_values(out, w.b1.transpose());
  write_values(out, w.norm_scale.transpose());
  write_values(out, w.norm_shift.transpose());
  write_values(out, w.w2);
  write_values(out, w.b2.transpose());
  return out;
}

}  // namespace irispad
