#include "irispad/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <numbers>
#include <random>

#include "irispad/error.hpp"
#include "irispad/rng.hpp"
#include "irispad/text_util.hpp"

namespace irispad {

namespace {

constexpr std::size_t kWilcoxonExactMaxN = 20;
constexpr double kMannWhitneyExactMaxCount = 2e6;

/// Mid-ranks (1-based) doubled so that tied ranks stay integral.
std::vector<long> doubled_midranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<long> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    // positions i..j (0-based) share rank ((i+1) + (j+1)) / 2
    const long doubled = static_cast<long>(i + j + 2);
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = doubled;
    i = j + 1;
  }
  return ranks;
}

/// Sum of t^3 - t over tie groups.
double tie_term(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  double term = 0.0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i + 1);
    term += t * t * t - t;
    i = j + 1;
  }
  return term;
}

double two_sided(double lower, double upper) {
  return std::min(1.0, 2.0 * std::min(lower, upper));
}

double normal_two_sided(double statistic, double mean, double variance) {
  if (variance <= 0.0) return 1.0;
  const double z =
      std::max(0.0, std::abs(statistic - mean) - 0.5) / std::sqrt(variance);
  return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

double binomial(std::size_t n, std::size_t k) {
  k = std::min(k, n - k);
  double out = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    out = out * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return out;
}

}  // namespace

std::string_view to_string(StatMethod m) {
  return m == StatMethod::Exact ? "exact" : "normal_approx";
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

LearningCurve learning_curve(std::span<const Verdict> verdicts,
                             std::uint64_t seed) {
  std::array<std::vector<const Verdict*>, kClassCount> by_class;
  for (const auto& v : verdicts) by_class[class_index(v.cls)].push_back(&v);
  std::size_t longest = 0;
  for (auto c : kAllClasses) {
    auto& group = by_class[class_index(c)];
    if (group.empty()) throw Error(ErrorCode::MissingClass, std::string(to_string(c)));
    std::sort(group.begin(), group.end(), [](const Verdict* a, const Verdict* b) {
      return a->sample_id < b->sample_id;
    });
    std::mt19937_64 rng(derive_seed(seed, to_string(c)));
    for (std::size_t i = group.size() - 1; i > 0; --i) {
      std::swap(group[i], group[uniform_below(rng, i + 1)]);
    }
    longest = std::max(longest, group.size());
  }

  LearningCurve curve;
  curve.shuffle_seed = seed;
  std::vector<Verdict> subset;
  for (std::size_t n = 1; n <= longest; ++n) {
    subset.clear();
    for (const auto& group : by_class) {
      const auto take = std::min(n, group.size());
      for (std::size_t i = 0; i < take; ++i) subset.push_back(*group[i]);
    }
    curve.points.push_back({n, aggregate_mse(error_rates(subset)).value});
  }
  return curve;
}

std::optional<std::size_t> converged_at(const LearningCurve& curve,
                                        double epsilon) {
  if (curve.points.empty()) {
    throw Error(ErrorCode::InvalidArgument, "curve", "no points");
  }
  const double last = curve.points.back().mse;
  std::optional<std::size_t> n0;
  for (auto it = curve.points.rbegin(); it != curve.points.rend(); ++it) {
    if (std::abs(it->mse - last) < epsilon) {
      n0 = it->n_per_class;
    } else {
      break;
    }
  }
  return n0;
}

StatResult wilcoxon_signed_rank(std::span<const double> x,
                                std::span<const double> y,
                                MethodChoice choice) {
  if (x.size() != y.size() || x.empty()) {
    throw Error(ErrorCode::InvalidArgument, "x,y",
                "paired samples must be non-empty and of equal length");
  }
  std::vector<double> magnitude;
  std::vector<bool> positive;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    if (d == 0.0) continue;
    magnitude.push_back(std::abs(d));
    positive.push_back(d > 0.0);
  }
  const std::size_t n = magnitude.size();
  if (n == 0) throw Error(ErrorCode::AllZeroDifferences, std::to_string(x.size()));

  const auto ranks = doubled_midranks(magnitude);
  long w2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (positive[i]) w2 += ranks[i];
  }

  StatResult out;
  out.test = "wilcoxon";
  out.statistic = static_cast<double>(w2) / 2.0;
  out.n = "n=" + std::to_string(n);

  const bool exact = choice == MethodChoice::Exact ||
                     (choice == MethodChoice::Auto && n <= kWilcoxonExactMaxN);
  if (exact) {
    // null distribution of doubled W+ over all 2^n sign assignments
    const long total = std::accumulate(ranks.begin(), ranks.end(), 0L);
    std::vector<double> ways(static_cast<std::size_t>(total) + 1, 0.0);
    ways[0] = 1.0;
    long reach = 0;
    for (long r : ranks) {
      for (long s = reach; s >= 0; --s) {
        if (ways[static_cast<std::size_t>(s)] != 0.0) {
          ways[static_cast<std::size_t>(s + r)] += ways[static_cast<std::size_t>(s)];
        }
      }
      reach += r;
    }
    const double all = std::ldexp(1.0, static_cast<int>(n));
    double lower = 0.0;
    double upper = 0.0;
    for (long s = 0; s <= total; ++s) {
      const double w = ways[static_cast<std::size_t>(s)];
      if (s <= w2) lower += w;
      if (s >= w2) upper += w;
    }
    out.method = StatMethod::Exact;
    out.p_value = two_sided(lower / all, upper / all);
    return out;
  }

  // W+ is a sum of independent r_i/2 +- r_i/2 terms, so its cumulants are
  // exact even under ties; the fourth one feeds an Edgeworth term
  double mean = 0.0;
  double k2 = 0.0;
  double k4 = 0.0;
  for (long r2 : ranks) {
    const double r = static_cast<double>(r2) / 2.0;
    mean += r / 2.0;
    k2 += r * r / 4.0;
    k4 -= r * r * r * r / 8.0;
  }
  out.method = StatMethod::NormalApprox;
  const double z = std::max(0.0, std::abs(out.statistic - mean) - 0.5) / std::sqrt(k2);
  const double density = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  const double upper = 0.5 * std::erfc(z / std::sqrt(2.0)) +
                       density * (k4 / (k2 * k2)) / 24.0 * (z * z * z - 3.0 * z);
  out.p_value = std::clamp(2.0 * upper, 0.0, 1.0);
  return out;
}

StatResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                          MethodChoice choice) {
  if (a.empty() || b.empty()) {
    throw Error(ErrorCode::InvalidArgument, "a,b", "both samples must be non-empty");
  }
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  const std::size_t total_n = n + m;
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const auto ranks = doubled_midranks(pooled);

  long rank_sum_a2 = 0;
  for (std::size_t i = 0; i < n; ++i) rank_sum_a2 += ranks[i];
  // U = R_a - n(n+1)/2, doubled
  const long offset2 = static_cast<long>(n * (n + 1));
  const long u2 = rank_sum_a2 - offset2;

  StatResult out;
  out.test = "mann_whitney_u";
  out.statistic = static_cast<double>(u2) / 2.0;
  out.n = "n=" + std::to_string(n) + ",m=" + std::to_string(m);

  const double assignments = binomial(total_n, n);
  const bool exact =
      choice == MethodChoice::Exact ||
      (choice == MethodChoice::Auto && assignments <= kMannWhitneyExactMaxCount);
  if (exact) {
    // ways[k][s]: subsets of k pooled items whose doubled ranks sum to s
    const long max_sum = std::accumulate(ranks.begin(), ranks.end(), 0L);
    const std::size_t width = static_cast<std::size_t>(max_sum) + 1;
    std::vector<double> ways((n + 1) * width, 0.0);
    ways[0] = 1.0;
    for (std::size_t item = 0; item < total_n; ++item) {
      const long r = ranks[item];
      for (std::size_t k = std::min(n, item + 1); k >= 1; --k) {
        double* dst = &ways[k * width];
        const double* src = &ways[(k - 1) * width];
        for (long s = max_sum - r; s >= 0; --s) {
          if (src[s] != 0.0) dst[s + r] += src[s];
        }
      }
    }
    double lower = 0.0;
    double upper = 0.0;
    double all = 0.0;
    const double* row = &ways[n * width];
    for (long s = 0; s <= max_sum; ++s) {
      const double w = row[s];
      if (w == 0.0) continue;
      all += w;
      if (s <= rank_sum_a2) lower += w;
      if (s >= rank_sum_a2) upper += w;
    }
    out.method = StatMethod::Exact;
    out.p_value = two_sided(lower / all, upper / all);
    return out;
  }

  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);
  const double big_n = nd + md;
  const double mean = nd * md / 2.0;
  const double variance =
      nd * md / 12.0 *
      ((big_n + 1.0) - tie_term(pooled) / (big_n * (big_n - 1.0)));
  out.method = StatMethod::NormalApprox;
  out.p_value = normal_two_sided(out.statistic, mean, variance);
  return out;
}

std::string format_stat_result(const StatResult& r) {
  return r.test + " | " + text::format_double(r.statistic) + " | " +
         text::format_double(r.p_value) + " | " +
         std::string(to_string(r.method)) + " | " + r.n;
}

}  // namespace irispad
