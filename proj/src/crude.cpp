#include "crude/crude.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace crude {

CrudeModel::CrudeModel(EmpiricalErrorDistribution dist) : dist_(std::move(dist)) {
  if (dist_.z_sorted.empty()) throw EmptySet("calibration set");
}

std::vector<double> sorted_z_scores(const PredictionSet& cal) {
  if (cal.empty()) throw EmptySet("calibration set");
  if (!cal.labeled) throw UnlabeledSet("calibration set");
  std::vector<double> z;
  z.reserve(cal.size());
  for (std::size_t i = 0; i < cal.size(); ++i) {
    const auto& r = cal.records[i];
    const double zi = (*r.y - r.mu) / r.sigma;
    if (!std::isfinite(zi)) throw NonFiniteValue(i);
    z.push_back(zi);
  }
  std::sort(z.begin(), z.end());
  return z;
}

CrudeModel fit_crude(const PredictionSet& cal) {
  return CrudeModel(EmpiricalErrorDistribution::from_samples(sorted_z_scores(cal)));
}

double crude_quantile(const CrudeModel& model, Prediction pred, double p) {
  detail::check_probability_closed(p);
  detail::check_query_sigma(pred.sigma);
  const auto& z = model.dist().z_sorted;
  return pred.mu + pred.sigma * z[order_statistic_index(p, z.size())];
}

double crude_cdf(const CrudeModel& model, Prediction pred, double y) {
  detail::check_query_sigma(pred.sigma);
  detail::check_finite_target(y);
  const auto& z = model.dist().z_sorted;
  const double zy = (y - pred.mu) / pred.sigma;
  const auto count = std::upper_bound(z.begin(), z.end(), zy) - z.begin();
  return static_cast<double>(count) / static_cast<double>(z.size());
}

Moments crude_moments(const CrudeModel& model, Prediction pred) {
  detail::check_query_sigma(pred.sigma);
  const auto& d = model.dist();
  return {pred.mu + pred.sigma * d.mean_z, pred.sigma * pred.sigma * d.var_z};
}

}  // namespace crude
