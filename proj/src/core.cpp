#include "crude/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace crude {

namespace {

std::string at_row(const char* what, std::size_t row) {
  return std::string(what) + " at row " + std::to_string(row);
}

}  // namespace

NonFiniteValue::NonFiniteValue() : ValidationError("non-finite value") {}

NonFiniteValue::NonFiniteValue(std::size_t row_)
    : ValidationError(at_row("non-finite value", row_)), row(row_) {}

NonPositiveSigma::NonPositiveSigma() : ValidationError("sigma must be positive") {}

NonPositiveSigma::NonPositiveSigma(std::size_t row_)
    : ValidationError(at_row("sigma must be positive", row_)), row(row_) {}

EmptySet::EmptySet(const std::string& what_set)
    : ValidationError(what_set + " is empty") {}

UnlabeledSet::UnlabeledSet(const std::string& what_set)
    : ValidationError(what_set + " has rows without observed y") {}

TooFewPoints::TooFewPoints(std::size_t have_, std::size_t need_)
    : ValidationError("need at least " + std::to_string(need_) + " points, got " +
                      std::to_string(have_)),
      have(have_),
      need(need_) {}

ProbabilityOutOfRange::ProbabilityOutOfRange(double p_)
    : ValidationError("probability " + std::to_string(p_) + " outside [0, 1]"), p(p_) {}

ProbabilityOutOfOpenRange::ProbabilityOutOfOpenRange(double p_)
    : ValidationError("probability " + std::to_string(p_) + " outside (0, 1)"), p(p_) {}

InvertedLevels::InvertedLevels(double p_lo, double p_hi)
    : ValidationError("interval levels inverted: " + std::to_string(p_lo) +
                      " >= " + std::to_string(p_hi)) {}

LengthMismatch::LengthMismatch(std::size_t a, std::size_t b)
    : ValidationError("length mismatch: " + std::to_string(a) + " vs " +
                      std::to_string(b)) {}

EmpiricalErrorDistribution EmpiricalErrorDistribution::from_samples(std::vector<double> z) {
  if (z.empty()) throw EmptySet("z-score sample");
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!std::isfinite(z[i])) throw NonFiniteValue(i);
  }
  std::sort(z.begin(), z.end());

  const double n = static_cast<double>(z.size());
  double sum = 0.0;
  for (double v : z) sum += v;
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : z) ss += (v - mean) * (v - mean);

  EmpiricalErrorDistribution dist;
  dist.z_sorted = std::move(z);
  dist.mean_z = mean;
  dist.var_z = ss / n;
  return dist;
}

PredictionSet validate_predictions(std::vector<PredictionRecord> rows) {
  if (rows.empty()) throw EmptySet("prediction rows");
  bool labeled = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (!std::isfinite(r.mu) || !std::isfinite(r.sigma)) throw NonFiniteValue(i);
    if (r.y && !std::isfinite(*r.y)) throw NonFiniteValue(i);
    if (!(r.sigma > 0.0)) throw NonPositiveSigma(i);
    labeled = labeled && r.y.has_value();
  }
  return PredictionSet{std::move(rows), labeled};
}

std::size_t order_statistic_index(double p, std::size_t n) {
  const auto idx = static_cast<std::size_t>(std::floor(p * static_cast<double>(n)));
  return std::min(idx, n - 1);
}

namespace detail {

void check_probability_closed(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ProbabilityOutOfRange(p);
}

void check_probability_open(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ProbabilityOutOfOpenRange(p);
}

void check_query_sigma(double sigma) {
  if (!std::isfinite(sigma) || !(sigma > 0.0)) throw NonPositiveSigma();
}

void check_finite_target(double y) {
  if (!std::isfinite(y)) throw NonFiniteValue();
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace detail

}  // namespace crude
