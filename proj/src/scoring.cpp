#include "irispad/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "irispad/error.hpp"
#include "irispad/text_util.hpp"

namespace irispad {

std::string_view to_string(Decision d) {
  return d == Decision::Attack ? "attack" : "bona_fide";
}

std::optional<Decision> parse_decision(std::string_view token) {
  if (token == "attack") return Decision::Attack;
  if (token == "bona_fide") return Decision::BonaFide;
  return std::nullopt;
}

Decision classify(double confidence, double threshold) {
  if (!(confidence >= 0.0 && confidence <= 1.0)) {
    throw Error(ErrorCode::OutOfRange, text::format_double(confidence),
                "confidence must lie in [0, 1]");
  }
  return confidence >= threshold ? Decision::Attack : Decision::BonaFide;
}

Verdict make_verdict(std::string sample_id, PresentationClass cls,
                     double confidence, double threshold) {
  return Verdict{std::move(sample_id), cls, confidence,
                 classify(confidence, threshold)};
}

std::optional<double> ClassErrorRates::rate(PresentationClass c) const {
  auto it = rates.find(c);
  if (it == rates.end()) return std::nullopt;
  return it->second;
}

ClassErrorRates ClassErrorRates::from_rates(
    std::span<const double> canonical_rates) {
  if (canonical_rates.size() != kClassCount) {
    throw Error(ErrorCode::InvalidArgument, "rates",
                "expected 8 rates in canonical class order");
  }
  ClassErrorRates out;
  for (std::size_t i = 0; i < kClassCount; ++i) {
    const double r = canonical_rates[i];
    if (!(r >= 0.0 && r <= 1.0)) {
      throw Error(ErrorCode::OutOfRange, text::format_double(r),
                  "rate must lie in [0, 1]");
    }
    out.rates[kAllClasses[i]] = r;
  }
  return out;
}

ClassErrorRates error_rates(std::span<const Verdict> verdicts) {
  ClassErrorRates out;
  for (const auto& v : verdicts) {
    auto& count = out.counts[v.cls];
    ++count.total;
    const bool wrong = is_bona_fide(v.cls) ? v.decision == Decision::Attack
                                           : v.decision == Decision::BonaFide;
    if (wrong) ++count.errors;
  }
  for (const auto& [cls, count] : out.counts) {
    out.rates[cls] = static_cast<double>(count.errors) /
                     static_cast<double>(count.total);
  }
  return out;
}

MseScore aggregate_mse(const ClassErrorRates& rates) {
  double sum = 0.0;
  for (auto c : kAllClasses) {
    auto r = rates.rate(c);
    if (!r) throw Error(ErrorCode::MissingClass, std::string(to_string(c)));
    sum += *r * *r;
  }
  return MseScore{sum / static_cast<double>(kClassCount)};
}

std::vector<HistogramBin> confidence_histogram(std::span<const Verdict> verdicts,
                                               int bins) {
  if (bins < 1) throw Error(ErrorCode::InvalidArgument, "bins", "must be >= 1");
  std::vector<HistogramBin> out(static_cast<std::size_t>(bins));
  for (int b = 0; b < bins; ++b) {
    out[static_cast<std::size_t>(b)].lower =
        static_cast<double>(b) / static_cast<double>(bins);
  }
  for (const auto& v : verdicts) {
    auto index = static_cast<long>(std::floor(v.confidence * bins));
    index = std::clamp<long>(index, 0, bins - 1);
    ++out[static_cast<std::size_t>(index)].count;
  }
  return out;
}

double extreme_bin_mass(std::span<const HistogramBin> histogram) {
  if (histogram.empty()) return 0.0;
  std::size_t total = 0;
  for (const auto& b : histogram) total += b.count;
  if (total == 0) return 0.0;
  std::size_t extreme = histogram.front().count;
  if (histogram.size() > 1) extreme += histogram.back().count;
  return static_cast<double>(extreme) / static_cast<double>(total);
}

}  // namespace irispad
