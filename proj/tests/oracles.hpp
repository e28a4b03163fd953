#pragma once

// Independent reference implementations. Nothing here calls into the
// library's numerical code paths.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <vector>

namespace oracle {

/// erf via the positive-term series 2/sqrt(pi) e^{-x^2} sum 2^n x^{2n+1} / (2n+1)!!
inline double erf_series(double x) {
  const double sign = x < 0 ? -1.0 : 1.0;
  x = std::fabs(x);
  if (x > 6.0) return sign;
  long double term = x;
  long double sum = term;
  for (int n = 1; n < 400; ++n) {
    term *= 2.0L * x * x / (2.0L * n + 1.0L);
    sum += term;
    if (term < sum * 1e-21L) break;
  }
  const long double pi = 3.141592653589793238462643383279502884L;
  return sign * static_cast<double>(2.0L / std::sqrt(pi) * std::exp(-(long double)x * x) * sum);
}

inline double gelu(double x) { return 0.5 * x * (1.0 + erf_series(x / std::sqrt(2.0))); }

/// Average ranks (1-based) of `v`, ties sharing the mean of their positions.
inline std::vector<double> midranks(const std::vector<double>& v) {
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double below = 0;
    double equal = 0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (v[j] < v[i]) ++below;
      if (v[j] == v[i]) ++equal;
    }
    ranks[i] = below + (equal + 1.0) / 2.0;
  }
  return ranks;
}

struct Exact {
  double statistic;
  double p_value;
};

inline double two_sided(double le, double ge, double total) {
  return std::min(1.0, 2.0 * std::min(le, ge) / total);
}

/// Signed-rank test by enumerating all 2^n sign patterns.
inline Exact wilcoxon_brute(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> d;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] != y[i]) d.push_back(x[i] - y[i]);
  }
  std::vector<double> mags;
  for (double v : d) mags.push_back(std::fabs(v));
  const auto r = midranks(mags);
  double w = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] > 0) w += r[i];
  }
  const std::uint64_t patterns = std::uint64_t{1} << d.size();
  double le = 0;
  double ge = 0;
  for (std::uint64_t mask = 0; mask < patterns; ++mask) {
    double s = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (mask >> i & 1) s += r[i];
    }
    if (s <= w + 1e-9) ++le;
    if (s >= w - 1e-9) ++ge;
  }
  return {w, two_sided(le, ge, static_cast<double>(patterns))};
}

/// U for `a` by direct pairwise comparison.
inline double u_statistic(const std::vector<double>& a, const std::vector<double>& b) {
  double u = 0;
  for (double p : a) {
    for (double q : b) {
      if (p > q) u += 1.0;
      else if (p == q) u += 0.5;
    }
  }
  return u;
}

/// Rank-sum test by enumerating every split of the pooled sample.
inline Exact mann_whitney_brute(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  const double u_obs = u_statistic(a, b);
  double le = 0;
  double ge = 0;
  double total = 0;
  std::vector<bool> pick(pooled.size(), false);
  std::fill(pick.begin(), pick.begin() + static_cast<long>(a.size()), true);
  std::sort(pick.begin(), pick.end());
  do {
    std::vector<double> ga;
    std::vector<double> gb;
    for (std::size_t i = 0; i < pooled.size(); ++i) (pick[i] ? ga : gb).push_back(pooled[i]);
    const double u = u_statistic(ga, gb);
    if (u <= u_obs + 1e-9) ++le;
    if (u >= u_obs - 1e-9) ++ge;
    ++total;
  } while (std::next_permutation(pick.begin(), pick.end()));
  return {u_obs, two_sided(le, ge, total)};
}

/// Row-major dense matrix helpers for the naive forward pass.
using Matrix = std::vector<std::vector<double>>;

/// Fusion forward pass with explicit loops. `w1` is in x hidden, `w2` is
/// hidden x out.
inline std::vector<double> fuse_naive(const std::vector<double>& image,
                                      const std::vector<double>& text,
                                      const Matrix& w1, const std::vector<double>& b1,
                                      const std::vector<double>& scale,
                                      const std::vector<double>& shift,
                                      const Matrix& w2, const std::vector<double>& b2) {
  std::vector<double> x(image);
  x.insert(x.end(), text.begin(), text.end());
  const std::size_t hidden = b1.size();
  std::vector<double> h(hidden, 0.0);
  for (std::size_t j = 0; j < hidden; ++j) {
    double s = b1[j];
    for (std::size_t i = 0; i < x.size(); ++i) s += w1[i][j] * x[i];
    h[j] = s;
  }
  double mean = 0;
  for (double v : h) mean += v;
  mean /= static_cast<double>(hidden);
  double var = 0;
  for (double v : h) var += (v - mean) * (v - mean);
  var /= static_cast<double>(hidden);
  for (std::size_t j = 0; j < hidden; ++j) {
    h[j] = gelu((h[j] - mean) / std::sqrt(var + 1e-5) * scale[j] + shift[j]);
  }
  std::vector<double> out(b2.size(), 0.0);
  for (std::size_t k = 0; k < b2.size(); ++k) {
    double s = b2[k];
    for (std::size_t j = 0; j < hidden; ++j) s += w2[j][k] * h[j];
    out[k] = s;
  }
  return out;
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, descending.
inline std::vector<double> jacobi_eigenvalues(Matrix a) {
  const std::size_t n = a.size();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    }
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::fabs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p];
          const double akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k];
          const double aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a[i][i];
  std::sort(ev.rbegin(), ev.rend());
  return ev;
}

/// Sample covariance (N - 1) with explicit loops.
inline Matrix covariance(const Matrix& rows) {
  const std::size_t n = rows.size();
  const std::size_t d = rows.front().size();
  std::vector<double> mean(d, 0.0);
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < d; ++j) mean[j] += r[j] / static_cast<double>(n);
  }
  Matrix c(d, std::vector<double>(d, 0.0));
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        c[i][j] += (r[i] - mean[i]) * (r[j] - mean[j]) / static_cast<double>(n - 1);
      }
    }
  }
  return c;
}

/// Mean silhouette straight from the definition.
inline double silhouette(const Matrix& pts, const std::vector<int>& labels) {
  auto dist = [&](std::size_t i, std::size_t j) {
    double s = 0;
    for (std::size_t k = 0; k < pts[i].size(); ++k) {
      s += (pts[i][k] - pts[j][k]) * (pts[i][k] - pts[j][k]);
    }
    return std::sqrt(s);
  };
  std::vector<int> distinct(labels);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  double total = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double a = 0;
    double own = 0;
    double b = 1e300;
    for (int lab : distinct) {
      double sum = 0;
      double cnt = 0;
      for (std::size_t j = 0; j < pts.size(); ++j) {
        if (labels[j] != lab || j == i) continue;
        sum += dist(i, j);
        ++cnt;
      }
      if (lab == labels[i]) {
        a = sum;
        own = cnt;
      } else if (cnt > 0) {
        b = std::min(b, sum / cnt);
      }
    }
    if (own == 0) continue;
    a /= own;
    total += (b - a) / std::max(a, b);
  }
  return total / static_cast<double>(pts.size());
}

}  // namespace oracle
