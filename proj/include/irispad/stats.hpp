#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "irispad/scoring.hpp"

namespace irispad {

struct CurvePoint {
  std::size_t n_per_class = 0;
  double mse = 0.0;
};

struct LearningCurve {
  std::vector<CurvePoint> points;
  std::uint64_t shuffle_seed = 0;
};

/// MSE recomputed on the first n verdicts of every class (after a seeded
/// per-class shuffle) for n = 1 .. largest class size. Smaller classes
/// contribute all their verdicts once n exceeds their size. Throws
/// Error(MissingClass) if any class has no verdicts.
LearningCurve learning_curve(std::span<const Verdict> verdicts,
                             std::uint64_t seed);

/// Smallest n0 such that every point from n0 on lies strictly within
/// `epsilon` of the final point. Empty when no such point exists (only
/// possible for epsilon <= 0).
std::optional<std::size_t> converged_at(const LearningCurve& curve,
                                        double epsilon = 0.05);

enum class StatMethod { Exact, NormalApprox };

std::string_view to_string(StatMethod m);

/// Method selection. Auto uses the exact null distribution within the
/// enumeration bounds (n <= 20 non-zero differences for Wilcoxon,
/// C(n+m, n) <= 2e6 for Mann-Whitney) and the normal approximation beyond.
enum class MethodChoice { Auto, Exact, NormalApprox };

struct StatResult {
  std::string test;
  double statistic = 0.0;
  double p_value = 1.0;
  StatMethod method = StatMethod::Exact;
  /// "n=<k>" for the signed-rank test, "n=<a>,m=<b>" for Mann-Whitney.
  std::string n;
};

/// Two-sided signed-rank test on x - y. Zero differences are dropped, ties
/// get mid-ranks; the statistic is W+. Throws Error(AllZeroDifferences).
StatResult wilcoxon_signed_rank(std::span<const double> x,
                                std::span<const double> y,
                                MethodChoice choice = MethodChoice::Auto);

/// Two-sided rank-sum test; the statistic is U for `a`
/// (pairs a > b count 1, ties 1/2).
StatResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                          MethodChoice choice = MethodChoice::Auto);

/// Standard normal CDF.
double normal_cdf(double z);

/// `test | statistic | p | method | n`
std::string format_stat_result(const StatResult& r);

}  // namespace irispad
