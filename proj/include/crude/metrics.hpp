#pragma once

#include <functional>
#include <iosfwd>

#include "crude/core.hpp"

namespace crude {

using QuantileFn = std::function<double(const PredictionRecord&, double p)>;
using VarianceFn = std::function<double(const PredictionRecord&)>;
using CdfFn = std::function<double(const PredictionRecord&, double y)>;

// Probability integral transform values F_x(y), one per labeled record.
struct PitSample {
  std::vector<double> values;
};

// Observed coverage p_hat_j = (1/N) |{ y < F^-1(p_j) }| at the S + 1 levels
// p_j = j / S. The inequality is strict: a y tied with the quantile counts
// as not covered.
CalibrationCurve calibration_curve(const PredictionSet& test, const QuantileFn& quantile_fn,
                                   int step_count);

// sqrt((1/S) * sum_j (p_hat_j - p_j)^2) over all S + 1 knots.
double calibration_score(const CalibrationCurve& curve);

// sqrt of the mean calibrated predicted variance over the test set.
double sharpness(const PredictionSet& test, const VarianceFn& variance_fn);

PitSample pit_values(const PredictionSet& test, const CdfFn& cdf_fn);

// CSV with header "p,p_hat", one knot per row, full round-trip precision.
void write_curve_csv(const CalibrationCurve& curve, std::ostream& out);

}  // namespace crude
