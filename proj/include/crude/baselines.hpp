#pragma once

#include "crude/core.hpp"

namespace crude {

// Standard normal CDF.
double normal_cdf(double z);

// Standard normal quantile for p in (0, 1). Rational approximation with
// absolute error below 1e-9 across the usable range.
double normal_quantile(double p);

// z-scores modeled as Normal(m, s^2); the predictive law for (mu, sigma)
// is then Normal(mu + sigma * m, (sigma * s)^2).
struct GaussianMleModel {
  double m = 0.0;
  double s = 1.0;
};

// Floor applied to the fitted scale so degenerate calibration sets stay usable.
inline constexpr double kMinMleScale = 1e-12;

GaussianMleModel fit_gaussian_mle(const PredictionSet& cal);

double gaussian_mle_quantile(const GaussianMleModel& model, Prediction pred, double p);

// Monotone recalibration map p -> R(p) over CDF values of the base Gaussian,
// stored as interpolation knots. iso_x is strictly increasing and starts/ends
// with the pinned endpoints (0, 0) and (1, 1); iso_y is non-decreasing.
struct KuleshovModel {
  std::vector<double> iso_x;
  std::vector<double> iso_y;
};

// Inverted map values are clamped to this band before the Gaussian quantile.
inline constexpr double kKuleshovLevelClamp = 1e-6;

KuleshovModel fit_kuleshov(const PredictionSet& cal);

// R(p) by linear interpolation between knots; p is clamped to [0, 1].
double kuleshov_map(const KuleshovModel& model, double p);

// Smallest p' with R(p') >= p (the infimum on flat stretches), then the base
// quantile mu + sigma * Phi^-1(p') with p' clamped away from 0 and 1.
double kuleshov_quantile(const KuleshovModel& model, Prediction pred, double p);

// The base model taken at its word: mu + sigma * Phi^-1(p).
double identity_quantile(Prediction pred, double p);

// Weighted least-squares non-decreasing fit (pool adjacent violators).
// x must be sorted ascending; pooled blocks carry their weighted mean.
std::vector<double> pava(const std::vector<double>& x, const std::vector<double>& y,
                         const std::vector<double>& weights);

}  // namespace crude
