#include "crude/recalibrator.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace crude {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Kuleshov has no closed-form variance; midpoint quadrature over 1000
// quantile slices, nodes p_k = (k + 0.5) / 1000.
constexpr int kVarianceSlices = 1000;

double kuleshov_variance(const KuleshovModel& model, Prediction pred) {
  double q[kVarianceSlices];
  double sum = 0.0;
  for (int k = 0; k < kVarianceSlices; ++k) {
    const double p = (static_cast<double>(k) + 0.5) / kVarianceSlices;
    q[k] = kuleshov_quantile(model, pred, p);
    sum += q[k];
  }
  const double mean = sum / kVarianceSlices;
  double ss = 0.0;
  for (double v : q) ss += (v - mean) * (v - mean);
  return ss / kVarianceSlices;
}

}  // namespace

Recalibrator::Recalibrator(Impl impl, std::string method)
    : impl_(std::move(impl)), method_(std::move(method)) {}

Recalibrator Recalibrator::identity() { return {IdentityModel{}, "none"}; }

Recalibrator Recalibrator::from_crude(CrudeModel model) {
  return {std::move(model), "crude"};
}

Recalibrator Recalibrator::from_gaussian_mle(GaussianMleModel model) {
  return {model, "gaussian_mle"};
}

Recalibrator Recalibrator::from_kuleshov(KuleshovModel model) {
  return {std::move(model), "kuleshov"};
}

Recalibrator Recalibrator::from_conformal(ConformalCalibration calib) {
  return {CrudeModel(EmpiricalErrorDistribution::from_samples(std::move(calib.scores))),
          "conformal"};
}

double Recalibrator::quantile(Prediction pred, double p) const {
  detail::check_probability_closed(p);
  detail::check_query_sigma(pred.sigma);
  if (const auto* m = std::get_if<CrudeModel>(&impl_)) return crude_quantile(*m, pred, p);
  // The remaining laws have unbounded support; the closed-range endpoints
  // map to the infinite quantiles instead of throwing.
  if (p == 0.0) return -kInf;
  if (p == 1.0) return kInf;
  if (std::holds_alternative<IdentityModel>(impl_)) return identity_quantile(pred, p);
  if (const auto* m = std::get_if<GaussianMleModel>(&impl_)) {
    return gaussian_mle_quantile(*m, pred, p);
  }
  return kuleshov_quantile(std::get<KuleshovModel>(impl_), pred, p);
}

double Recalibrator::cdf(Prediction pred, double y) const {
  detail::check_query_sigma(pred.sigma);
  detail::check_finite_target(y);
  if (const auto* m = std::get_if<CrudeModel>(&impl_)) return crude_cdf(*m, pred, y);
  const double z = (y - pred.mu) / pred.sigma;
  if (std::holds_alternative<IdentityModel>(impl_)) return normal_cdf(z);
  if (const auto* m = std::get_if<GaussianMleModel>(&impl_)) {
    return normal_cdf((z - m->m) / m->s);
  }
  return kuleshov_map(std::get<KuleshovModel>(impl_), normal_cdf(z));
}

double Recalibrator::variance(Prediction pred) const {
  detail::check_query_sigma(pred.sigma);
  if (const auto* m = std::get_if<CrudeModel>(&impl_)) {
    return crude_moments(*m, pred).variance;
  }
  if (std::holds_alternative<IdentityModel>(impl_)) return pred.sigma * pred.sigma;
  if (const auto* m = std::get_if<GaussianMleModel>(&impl_)) {
    return pred.sigma * pred.sigma * m->s * m->s;
  }
  return kuleshov_variance(std::get<KuleshovModel>(impl_), pred);
}

CalibrationCurve recalibrator_curve(const Recalibrator& recal, const PredictionSet& test,
                                    int step_count) {
  return calibration_curve(
      test, [&](const PredictionRecord& r, double p) { return recal.quantile(r.prediction(), p); },
      step_count);
}

PitSample recalibrator_pit(const Recalibrator& recal, const PredictionSet& test) {
  return pit_values(
      test, [&](const PredictionRecord& r, double y) { return recal.cdf(r.prediction(), y); });
}

EvaluationReport evaluate_recalibrator(const Recalibrator& recal, const PredictionSet& test,
                                       int step_count, std::uint64_t trial_seed) {
  EvaluationReport report;
  report.method = recal.method();
  report.calibration_rmse = calibration_score(recalibrator_curve(recal, test, step_count));
  report.sharpness =
      sharpness(test, [&](const PredictionRecord& r) { return recal.variance(r.prediction()); });
  report.trial_seed = trial_seed;
  return report;
}

}  // namespace crude
