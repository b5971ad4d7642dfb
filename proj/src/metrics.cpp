#include "crude/metrics.hpp"

#include <cmath>
#include <ostream>

namespace crude {

CalibrationCurve calibration_curve(const PredictionSet& test, const QuantileFn& quantile_fn,
                                   int step_count) {
  if (test.empty()) throw EmptySet("test set");
  if (!test.labeled) throw UnlabeledSet("test set");
  if (step_count < 1) throw ValidationError("step count must be at least 1");

  const double n = static_cast<double>(test.size());
  CalibrationCurve curve;
  curve.step_count = step_count;
  curve.expected.reserve(static_cast<std::size_t>(step_count) + 1);
  curve.observed.reserve(static_cast<std::size_t>(step_count) + 1);
  for (int j = 0; j <= step_count; ++j) {
    const double p = static_cast<double>(j) / static_cast<double>(step_count);
    std::size_t covered = 0;
    for (const auto& r : test.records) {
      if (*r.y < quantile_fn(r, p)) ++covered;
    }
    curve.expected.push_back(p);
    curve.observed.push_back(static_cast<double>(covered) / n);
  }
  return curve;
}

double calibration_score(const CalibrationCurve& curve) {
  if (curve.expected.size() != curve.observed.size()) {
    throw LengthMismatch(curve.expected.size(), curve.observed.size());
  }
  if (curve.step_count < 1 ||
      curve.expected.size() != static_cast<std::size_t>(curve.step_count) + 1) {
    throw ValidationError("curve knots inconsistent with step count");
  }
  double ss = 0.0;
  for (std::size_t j = 0; j < curve.expected.size(); ++j) {
    const double d = curve.observed[j] - curve.expected[j];
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(curve.step_count));
}

double sharpness(const PredictionSet& test, const VarianceFn& variance_fn) {
  if (test.empty()) throw EmptySet("test set");
  double sum = 0.0;
  for (const auto& r : test.records) sum += variance_fn(r);
  return std::sqrt(sum / static_cast<double>(test.size()));
}

PitSample pit_values(const PredictionSet& test, const CdfFn& cdf_fn) {
  if (test.empty()) throw EmptySet("test set");
  if (!test.labeled) throw UnlabeledSet("test set");
  PitSample sample;
  sample.values.reserve(test.size());
  for (const auto& r : test.records) sample.values.push_back(cdf_fn(r, *r.y));
  return sample;
}

void write_curve_csv(const CalibrationCurve& curve, std::ostream& out) {
  if (curve.expected.size() != curve.observed.size()) {
    throw LengthMismatch(curve.expected.size(), curve.observed.size());
  }
  out << "p,p_hat\n";
  for (std::size_t j = 0; j < curve.expected.size(); ++j) {
    out << detail::format_double(curve.expected[j]) << ','
        << detail::format_double(curve.observed[j]) << '\n';
  }
}

}  // namespace crude
