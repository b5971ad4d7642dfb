#pragma once

#include <string_view>
#include <variant>

#include "crude/baselines.hpp"
#include "crude/conformal.hpp"
#include "crude/crude.hpp"
#include "crude/metrics.hpp"

namespace crude {

// One query interface over the post-hoc methods, so metrics and the CLI do
// not care which recalibrator produced a model. Quantile queries at p = 0
// and p = 1 return -inf / +inf for the Gaussian-backed methods; the
// empirical methods return their extreme order statistics.
class Recalibrator {
 public:
  static Recalibrator identity();
  static Recalibrator from_crude(CrudeModel model);
  static Recalibrator from_gaussian_mle(GaussianMleModel model);
  static Recalibrator from_kuleshov(KuleshovModel model);
  // Same empirical law as crude, reported under the "conformal" name.
  static Recalibrator from_conformal(ConformalCalibration calib);

  double quantile(Prediction pred, double p) const;
  double cdf(Prediction pred, double y) const;
  double variance(Prediction pred) const;

  // "none", "crude", "gaussian_mle", "kuleshov" or "conformal".
  std::string_view method() const { return method_; }

  const CrudeModel* crude_model() const { return std::get_if<CrudeModel>(&impl_); }
  const GaussianMleModel* gaussian_mle_model() const {
    return std::get_if<GaussianMleModel>(&impl_);
  }
  const KuleshovModel* kuleshov_model() const { return std::get_if<KuleshovModel>(&impl_); }

 private:
  struct IdentityModel {};
  using Impl = std::variant<IdentityModel, CrudeModel, GaussianMleModel, KuleshovModel>;

  Recalibrator(Impl impl, std::string method);

  Impl impl_;
  std::string method_;
};

CalibrationCurve recalibrator_curve(const Recalibrator& recal, const PredictionSet& test,
                                    int step_count);

PitSample recalibrator_pit(const Recalibrator& recal, const PredictionSet& test);

// Calibration score plus sharpness in one report, tagged with the seed that
// produced this trial's split.
EvaluationReport evaluate_recalibrator(const Recalibrator& recal, const PredictionSet& test,
                                       int step_count, std::uint64_t trial_seed);

}  // namespace crude
