#pragma once

#include "crude/core.hpp"

namespace crude {

// Empirical recalibrator: the sorted calibration z-scores stand in for the
// predictive error law of every (mu, sigma) prediction. Fitting is
// O(L log L); each query afterwards is O(1) or O(log L) and const.
class CrudeModel {
 public:
  explicit CrudeModel(EmpiricalErrorDistribution dist);

  const EmpiricalErrorDistribution& dist() const { return dist_; }

 private:
  EmpiricalErrorDistribution dist_;
};

// z-scores (y - mu) / sigma of a labeled set, sorted ascending. Both
// fit_crude and fit_conformal consume exactly this.
std::vector<double> sorted_z_scores(const PredictionSet& cal);

CrudeModel fit_crude(const PredictionSet& cal);

// Step-function quantile mu + sigma * z_(idx) with idx = floor(p * L)
// clamped to the top order statistic. Accepts the closed range p in [0, 1].
double crude_quantile(const CrudeModel& model, Prediction pred, double p);

// Empirical CDF of the predictive distribution at y:
// |{ z_c <= (y - mu) / sigma }| / L.
double crude_cdf(const CrudeModel& model, Prediction pred, double y);

// Predictive mean mu + sigma * mean_z and variance sigma^2 * var_z.
Moments crude_moments(const CrudeModel& model, Prediction pred);

}  // namespace crude
