#pragma once

#include <utility>

#include "crude/core.hpp"

namespace crude {

// Split-conformal calibration state: the sorted signed nonconformity scores
// (y - mu) / sigma, one per calibration record.
struct ConformalCalibration {
  std::vector<double> scores;

  std::size_t size() const { return scores.size(); }
};

ConformalCalibration fit_conformal(const PredictionSet& cal);

// Score at level p: scores[floor(p * L)] clamped to the extremes. Uses the
// same index rule as crude_quantile, so the two agree bit for bit.
double conformal_level(const ConformalCalibration& calib, double p);

// Two-sided interval (mu + sigma * z_lo, mu + sigma * z_hi) for the level
// pair p_lo < p_hi. The lower endpoint never exceeds the upper one.
std::pair<double, double> conformal_interval(const ConformalCalibration& calib,
                                             Prediction pred, double p_lo, double p_hi);

}  // namespace crude
