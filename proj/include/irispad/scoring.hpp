#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "irispad/presentation_class.hpp"

namespace irispad {

enum class Decision { BonaFide, Attack };

std::string_view to_string(Decision d);
std::optional<Decision> parse_decision(std::string_view token);

inline constexpr double kDefaultThreshold = 0.5;

struct Verdict {
  std::string sample_id;
  PresentationClass cls = PresentationClass::Live;
  double confidence = 0.0;
  Decision decision = Decision::BonaFide;
};

/// Attack iff confidence >= threshold. Throws Error(OutOfRange) when the
/// confidence is outside [0, 1].
Decision classify(double confidence, double threshold = kDefaultThreshold);

Verdict make_verdict(std::string sample_id, PresentationClass cls,
                     double confidence, double threshold = kDefaultThreshold);

struct ClassCount {
  std::size_t errors = 0;
  std::size_t total = 0;

  bool operator==(const ClassCount&) const = default;
};

/// Per-class error rates. Live contributes BPCER (bona fide decided attack);
/// every attack class contributes its APCER (attack decided bona fide).
/// Classes without verdicts are absent.
struct ClassErrorRates {
  std::map<PresentationClass, double> rates;
  std::map<PresentationClass, ClassCount> counts;

  std::optional<double> rate(PresentationClass c) const;

  /// Rates given directly, e.g. a published table row in canonical order.
  static ClassErrorRates from_rates(std::span<const double> canonical_rates);
};

ClassErrorRates error_rates(std::span<const Verdict> verdicts);

struct MseScore {
  double value = 0.0;
};

/// Mean of squared per-class rates over all eight classes. Throws
/// Error(MissingClass) naming the first absent class.
MseScore aggregate_mse(const ClassErrorRates& rates);

struct HistogramBin {
  double lower = 0.0;
  std::size_t count = 0;

  bool operator==(const HistogramBin&) const = default;
};

/// Equal-width bins over [0, 1]; the last bin is closed at 1.0.
std::vector<HistogramBin> confidence_histogram(std::span<const Verdict> verdicts,
                                               int bins = 20);

/// Share of verdicts in the lowest and highest bins.
double extreme_bin_mass(std::span<const HistogramBin> histogram);

}  // namespace irispad
