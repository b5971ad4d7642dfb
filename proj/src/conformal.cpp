#include "crude/conformal.hpp"

#include "crude/crude.hpp"

namespace crude {

ConformalCalibration fit_conformal(const PredictionSet& cal) {
  return ConformalCalibration{sorted_z_scores(cal)};
}

double conformal_level(const ConformalCalibration& calib, double p) {
  detail::check_probability_closed(p);
  if (calib.scores.empty()) throw EmptySet("conformal calibration");
  return calib.scores[order_statistic_index(p, calib.scores.size())];
}

std::pair<double, double> conformal_interval(const ConformalCalibration& calib,
                                             Prediction pred, double p_lo, double p_hi) {
  if (!(p_lo < p_hi)) throw InvertedLevels(p_lo, p_hi);
  detail::check_query_sigma(pred.sigma);
  const double lower = pred.mu + pred.sigma * conformal_level(calib, p_lo);
  const double upper = pred.mu + pred.sigma * conformal_level(calib, p_hi);
  return {lower, upper};
}

}  // namespace crude
