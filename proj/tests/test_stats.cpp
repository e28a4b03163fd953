#include <doctest.h>

#include <random>

#include "irispad/error.hpp"
#include "irispad/stats.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace irispad;

namespace {

std::vector<double> distinct_values(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

std::vector<double> integer_values(std::mt19937_64& rng, std::size_t n, int range) {
  std::uniform_int_distribution<int> u(0, range);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

std::vector<Verdict> bernoulli_verdicts(std::uint64_t seed, std::size_t per_class,
                                        const std::array<double, 8>& rates) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Verdict> out;
  for (auto c : kAllClasses) {
    for (std::size_t i = 0; i < per_class; ++i) {
      const bool wrong = u(rng) < rates[class_index(c)];
      const bool attack = is_bona_fide(c) ? wrong : !wrong;
      out.push_back(make_verdict(std::string(to_string(c)) + std::to_string(i), c,
                                 attack ? 0.9 : 0.1));
    }
  }
  return out;
}

}  // namespace

TEST_CASE("signed-rank exact p matches sign enumeration without ties") {
  std::mt19937_64 rng(11);
  for (std::size_t n = 1; n <= 12; ++n) {
    for (int rep = 0; rep < 5; ++rep) {
      auto x = distinct_values(rng, n);
      auto y = distinct_values(rng, n);
      auto got = wilcoxon_signed_rank(x, y, MethodChoice::Exact);
      auto want = oracle::wilcoxon_brute(x, y);
      CHECK(got.method == StatMethod::Exact);
      CHECK(got.statistic == doctest::Approx(want.statistic).epsilon(1e-12));
      CHECK(std::fabs(got.p_value - want.p_value) <= 1e-12);
    }
  }
}

TEST_CASE("signed-rank exact p matches enumeration with tied magnitudes and zeros") {
  std::mt19937_64 rng(12);
  for (std::size_t n = 2; n <= 12; ++n) {
    auto x = integer_values(rng, n, 4);
    auto y = integer_values(rng, n, 4);
    bool any_nonzero = false;
    for (std::size_t i = 0; i < n; ++i) any_nonzero |= x[i] != y[i];
    if (!any_nonzero) continue;
    auto got = wilcoxon_signed_rank(x, y, MethodChoice::Exact);
    auto want = oracle::wilcoxon_brute(x, y);
    CHECK(got.statistic == doctest::Approx(want.statistic));
    CHECK(std::fabs(got.p_value - want.p_value) <= 1e-12);
  }
}

TEST_CASE("rank-sum exact p matches split enumeration") {
  std::mt19937_64 rng(21);
  for (std::size_t n = 1; n <= 8; ++n) {
    for (std::size_t m = 1; m <= 8; ++m) {
      auto a = distinct_values(rng, n);
      auto b = distinct_values(rng, m);
      auto got = mann_whitney_u(a, b, MethodChoice::Exact);
      auto want = oracle::mann_whitney_brute(a, b);
      CHECK(got.statistic == want.statistic);
      CHECK(std::fabs(got.p_value - want.p_value) <= 1e-12);
    }
  }
}

TEST_CASE("rank-sum exact p with ties matches enumeration") {
  std::mt19937_64 rng(22);
  for (int rep = 0; rep < 20; ++rep) {
    auto a = integer_values(rng, 2 + rep % 6, 3);
    auto b = integer_values(rng, 3 + rep % 5, 3);
    auto got = mann_whitney_u(a, b, MethodChoice::Exact);
    auto want = oracle::mann_whitney_brute(a, b);
    CHECK(got.statistic == want.statistic);
    CHECK(std::fabs(got.p_value - want.p_value) <= 1e-12);
  }
}

TEST_CASE("normal approximations track exact values at n = 15") {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 10; ++rep) {
    auto x = distinct_values(rng, 15);
    auto y = distinct_values(rng, 15);
    auto exact = wilcoxon_signed_rank(x, y, MethodChoice::Exact);
    auto approx = wilcoxon_signed_rank(x, y, MethodChoice::NormalApprox);
    CHECK(approx.method == StatMethod::NormalApprox);
    CHECK(std::fabs(exact.p_value - approx.p_value) < 0.01);

    auto mw_exact = mann_whitney_u(x, y, MethodChoice::Exact);
    auto mw_approx = mann_whitney_u(x, y, MethodChoice::NormalApprox);
    CHECK(std::fabs(mw_exact.p_value - mw_approx.p_value) < 0.01);
  }
}

TEST_CASE("auto method switches to the normal approximation for large samples") {
  std::mt19937_64 rng(32);
  auto x = distinct_values(rng, 40);
  auto y = distinct_values(rng, 40);
  CHECK(wilcoxon_signed_rank(x, y).method == StatMethod::NormalApprox);
  CHECK(wilcoxon_signed_rank(std::span(x).first(10), std::span(y).first(10)).method ==
        StatMethod::Exact);
  CHECK(mann_whitney_u(x, y).method == StatMethod::NormalApprox);
  CHECK(mann_whitney_u(std::span(x).first(8), std::span(y).first(8)).method ==
        StatMethod::Exact);
}

TEST_CASE("rank-sum is symmetric and permutation invariant") {
  std::mt19937_64 rng(41);
  for (int rep = 0; rep < 10; ++rep) {
    auto a = integer_values(rng, 6, 5);
    auto b = integer_values(rng, 7, 5);
    auto ab = mann_whitney_u(a, b);
    auto ba = mann_whitney_u(b, a);
    CHECK(ab.statistic + ba.statistic == doctest::Approx(42.0));
    CHECK(ab.p_value == doctest::Approx(ba.p_value).epsilon(1e-12));
    std::shuffle(a.begin(), a.end(), rng);
    std::shuffle(b.begin(), b.end(), rng);
    CHECK(mann_whitney_u(a, b).p_value == doctest::Approx(ab.p_value).epsilon(1e-12));
  }
}

TEST_CASE("p-values stay in [0, 1] and identical samples give p = 1") {
  std::vector<double> a{0.1, 0.2, 0.3};
  auto r = mann_whitney_u(a, a);
  CHECK(r.p_value == doctest::Approx(1.0));
  std::vector<double> x{1, 2, 3, 4, 5};
  std::vector<double> y{0, 0, 0, 0, 0};
  auto w = wilcoxon_signed_rank(x, y);
  CHECK(w.p_value == doctest::Approx(2.0 / 32.0));
  CHECK(w.n == "n=5");
}

TEST_CASE("signed-rank error cases") {
  std::vector<double> x{0.5, 0.5};
  CHECK_THROWS_CODE(wilcoxon_signed_rank(x, x), ErrorCode::AllZeroDifferences);
  std::vector<double> y{0.5};
  CHECK_THROWS_CODE(wilcoxon_signed_rank(x, y), ErrorCode::InvalidArgument);
  std::vector<double> empty;
  CHECK_THROWS_CODE(mann_whitney_u(x, empty), ErrorCode::InvalidArgument);
}

TEST_CASE("format_stat_result is a single pipe-separated line") {
  std::vector<double> x{1, 2, 3, 4, 5};
  std::vector<double> y{0, 0, 0, 0, 0};
  auto line = format_stat_result(wilcoxon_signed_rank(x, y));
  CHECK(line.find('\n') == std::string::npos);
  CHECK(line.rfind("wilcoxon | 15 | ", 0) == 0);
  CHECK(line.find("| exact | n=5") != std::string::npos);
}

TEST_CASE("normal_cdf reference points") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
  CHECK(normal_cdf(-1.0) == doctest::Approx(0.15865525393145707).epsilon(1e-12));
}

TEST_CASE("learning curve ends at the full-data MSE") {
  const std::array<double, 8> rates{0.0, 0.769, 0.700, 0.833, 0.833, 0.267, 0.833, 0.300};
  auto verdicts = bernoulli_verdicts(5, 30, rates);
  auto curve = learning_curve(verdicts, 9);
  REQUIRE(curve.points.size() == 30);
  CHECK(curve.points.front().n_per_class == 1);
  auto full = aggregate_mse(error_rates(verdicts)).value;
  CHECK(curve.points.back().mse == doctest::Approx(full).epsilon(1e-15));
  for (const auto& p : curve.points) {
    CHECK(p.mse >= 0.0);
    CHECK(p.mse <= 1.0);
  }
}

TEST_CASE("learning curve is seed-deterministic") {
  const std::array<double, 8> rates{0.2, 0.3, 0.4, 0.5, 0.5, 0.4, 0.3, 0.2};
  auto verdicts = bernoulli_verdicts(6, 20, rates);
  auto a = learning_curve(verdicts, 1);
  auto b = learning_curve(verdicts, 1);
  auto c = learning_curve(verdicts, 2);
  bool differs = false;
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(a.points[i].mse == b.points[i].mse);
    differs |= a.points[i].mse != c.points[i].mse;
  }
  CHECK(differs);
}

TEST_CASE("learning curve handles uneven class sizes") {
  std::vector<Verdict> verdicts;
  for (auto c : kAllClasses) {
    const std::size_t n = c == PresentationClass::Artificial ? 3 : 10;
    for (std::size_t i = 0; i < n; ++i) {
      verdicts.push_back(make_verdict(std::to_string(i), c, i % 2 ? 0.9 : 0.1));
    }
  }
  auto curve = learning_curve(verdicts, 3);
  CHECK(curve.points.size() == 10);
  verdicts.erase(std::remove_if(verdicts.begin(), verdicts.end(),
                                [](const Verdict& v) {
                                  return v.cls == PresentationClass::Printout;
                                }),
                 verdicts.end());
  CHECK_THROWS_CODE(learning_curve(verdicts, 3), ErrorCode::MissingClass);
}

TEST_CASE("converged_at finds the first point that stays within epsilon") {
  LearningCurve curve;
  const double values[] = {0.9, 0.1, 0.5, 0.33, 0.31, 0.29, 0.3};
  for (std::size_t i = 0; i < 7; ++i) curve.points.push_back({i + 1, values[i]});
  CHECK(converged_at(curve, 0.05) == std::optional<std::size_t>(4));
  CHECK(converged_at(curve, 0.001) == std::optional<std::size_t>(7));
  CHECK(converged_at(curve, 1.0) == std::optional<std::size_t>(1));
  CHECK_FALSE(converged_at(curve, 0.0).has_value());
}
