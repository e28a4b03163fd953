#include <doctest.h>

#include <random>

#include "irispad/error.hpp"
#include "irispad/reference.hpp"
#include "irispad/results_store.hpp"
#include "irispad/scoring.hpp"
#include "irispad/text_util.hpp"
#include "support.hpp"

using namespace irispad;

namespace {

double round3(double v) { return std::round(v * 1000.0) / 1000.0; }

std::vector<Verdict> uniform_verdicts(std::size_t per_class, double confidence) {
  std::vector<Verdict> out;
  for (auto c : kAllClasses) {
    for (std::size_t i = 0; i < per_class; ++i) {
      out.push_back(make_verdict(std::to_string(i), c, confidence));
    }
  }
  return out;
}

}  // namespace

TEST_CASE("threshold rule: attack iff confidence >= threshold") {
  CHECK(classify(0.5) == Decision::Attack);
  CHECK(classify(0.4999999) == Decision::BonaFide);
  CHECK(classify(0.0) == Decision::BonaFide);
  CHECK(classify(1.0) == Decision::Attack);
  CHECK(classify(0.3, 0.3) == Decision::Attack);
  CHECK_THROWS_CODE(classify(1.2), ErrorCode::OutOfRange);
  CHECK_THROWS_CODE(classify(-0.1), ErrorCode::OutOfRange);
  CHECK_THROWS_CODE(classify(std::nan("")), ErrorCode::OutOfRange);
}

TEST_CASE("live contributes BPCER, attack classes APCER") {
  std::vector<Verdict> v{
      make_verdict("l1", PresentationClass::Live, 0.9),
      make_verdict("l2", PresentationClass::Live, 0.1),
      make_verdict("l3", PresentationClass::Live, 0.2),
      make_verdict("l4", PresentationClass::Live, 0.3),
      make_verdict("p1", PresentationClass::Printout, 0.1),
      make_verdict("p2", PresentationClass::Printout, 0.9),
  };
  auto r = error_rates(v);
  CHECK(*r.rate(PresentationClass::Live) == doctest::Approx(0.25));
  CHECK(*r.rate(PresentationClass::Printout) == doctest::Approx(0.5));
  CHECK_FALSE(r.rate(PresentationClass::Synthetic).has_value());
  CHECK(r.counts.at(PresentationClass::Live) == ClassCount{1, 4});
  CHECK_THROWS_CODE(aggregate_mse(r), ErrorCode::MissingClass);
}

TEST_CASE("published rate rows aggregate to the published MSE") {
  for (const auto& row : reference::kPublishedRows) {
    CAPTURE(row.model);
    CAPTURE(row.variant);
    const double mse = aggregate_mse(ClassErrorRates::from_rates(row.rates)).value;
    CHECK(std::fabs(round3(mse) - row.reported_mse) <= 0.002);
  }
}

TEST_CASE("all-attack verdicts hit exactly one eighth") {
  auto all_attack = uniform_verdicts(5, 1.0);
  CHECK(aggregate_mse(error_rates(all_attack)).value == 0.125);
  auto all_bona = uniform_verdicts(5, 0.0);
  CHECK(aggregate_mse(error_rates(all_bona)).value == doctest::Approx(7.0 / 8.0));
}

TEST_CASE("MSE bounds and monotonicity") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    std::array<double, 8> rates{};
    for (auto& r : rates) r = u(rng);
    const double base = aggregate_mse(ClassErrorRates::from_rates(rates)).value;
    CHECK(base >= 0.0);
    CHECK(base <= 1.0);
    const auto k = static_cast<std::size_t>(rep % 8);
    auto raised = rates;
    raised[k] = std::min(1.0, rates[k] + 0.1);
    CHECK(aggregate_mse(ClassErrorRates::from_rates(raised)).value >= base);
  }
  std::array<double, 8> zeros{};
  CHECK(aggregate_mse(ClassErrorRates::from_rates(zeros)).value == 0.0);
  std::array<double, 8> ones;
  ones.fill(1.0);
  CHECK(aggregate_mse(ClassErrorRates::from_rates(ones)).value == 1.0);
}

TEST_CASE("from_rates validation") {
  std::array<double, 8> bad{0, 0, 0, 0, 0, 0, 0, 1.5};
  CHECK_THROWS_CODE(ClassErrorRates::from_rates(bad), ErrorCode::OutOfRange);
  std::vector<double> short_row(7, 0.1);
  CHECK_THROWS_CODE(ClassErrorRates::from_rates(short_row), ErrorCode::InvalidArgument);
}

TEST_CASE("histogram conserves counts and closes the last bin") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Verdict> v;
  for (int i = 0; i < 500; ++i) {
    v.push_back(make_verdict(std::to_string(i), kAllClasses[static_cast<std::size_t>(i) % 8], u(rng)));
  }
  v.push_back(make_verdict("one", PresentationClass::Live, 1.0));
  v.push_back(make_verdict("zero", PresentationClass::Live, 0.0));
  for (int bins : {1, 7, 20}) {
    auto h = confidence_histogram(v, bins);
    REQUIRE(h.size() == static_cast<std::size_t>(bins));
    std::size_t total = 0;
    for (const auto& b : h) total += b.count;
    CHECK(total == v.size());
    CHECK(h.front().lower == 0.0);
  }
  std::vector<Verdict> ones{make_verdict("a", PresentationClass::Live, 1.0)};
  CHECK(confidence_histogram(ones, 20).back().count == 1);
  std::vector<Verdict> edge{make_verdict("a", PresentationClass::Live, 0.05)};
  CHECK(confidence_histogram(edge, 20)[1].count == 1);
  CHECK_THROWS_CODE(confidence_histogram(v, 0), ErrorCode::InvalidArgument);
}

TEST_CASE("bimodal confidences concentrate in the extreme bins") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<Verdict> v;
    for (int i = 0; i < 200; ++i) {
      double c;
      const double pick = u(rng);
      if (pick < 0.45) c = u(rng) * 0.04;
      else if (pick < 0.9) c = 1.0 - u(rng) * 0.04;
      else c = u(rng);
      v.push_back(make_verdict(std::to_string(i), PresentationClass::Live, c));
    }
    auto h = confidence_histogram(v, 20);
    CHECK(extreme_bin_mass(h) >= 0.8);
  }
  std::vector<HistogramBin> empty;
  CHECK(extreme_bin_mass(empty) == 0.0);
}

TEST_CASE("store records round trip exactly") {
  StoreRecord r;
  r.sample_id = "synthetic_012";
  r.cls = PresentationClass::Synthetic;
  r.variant = parse_variant("long+llama_mesh");
  r.confidence = 0.1 + 0.2;
  r.decision = Decision::Attack;
  r.attempts = 3;
  const auto line = format_record(r);
  CHECK(line == "synthetic_012 | synthetic | long+llama_mesh | 0.30000000000000004 | attack | 3");
  CHECK(parse_record(line) == r);
  CHECK_THROWS_CODE(parse_record("a | live | short+none | x | attack | 1", 4), ErrorCode::MalformedRow);
  CHECK_THROWS_CODE(parse_record("a | live | short+none | 0.5 | maybe | 1"), ErrorCode::MalformedRow);
  CHECK_THROWS_CODE(parse_record("a | live | short+none | 0.5"), ErrorCode::MalformedRow);
}

TEST_CASE("store append, read and rewrite") {
  testing::TempDir dir;
  const auto path = dir / "results.txt";
  CHECK(read_store(path).empty());
  StoreRecord a{"live_000", PresentationClass::Live, parse_variant("short+none"), 0.0, Decision::BonaFide, 1};
  StoreRecord b{"printout_001", PresentationClass::Printout, parse_variant("long+human"), 1.0, Decision::Attack, 2};
  append_record(path, a);
  append_record(path, b);
  auto back = read_store(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0] == a);
  CHECK(back[1] == b);
  write_store(path, {b});
  CHECK(read_store(path) == std::vector<StoreRecord>{b});
  auto grouped = verdicts_by_variant({a, b});
  CHECK(grouped.size() == 2);
  CHECK(grouped.begin()->first == 0);
  CHECK(grouped.at(5).front().sample_id == "printout_001");
}
