#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace crude {

// Base class for everything this library throws.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad inputs: malformed rows, impossible parameters, misuse of a fitted
// model. Distinct from Error so callers can separate "your data is wrong"
// from "the library is broken".
struct ValidationError : Error {
  using Error::Error;
};

struct NonFiniteValue : ValidationError {
  NonFiniteValue();
  explicit NonFiniteValue(std::size_t row);
  std::optional<std::size_t> row;
};

struct NonPositiveSigma : ValidationError {
  NonPositiveSigma();
  explicit NonPositiveSigma(std::size_t row);
  std::optional<std::size_t> row;
};

struct EmptySet : ValidationError {
  explicit EmptySet(const std::string& what_set);
};

struct UnlabeledSet : ValidationError {
  explicit UnlabeledSet(const std::string& what_set);
};

struct TooFewPoints : ValidationError {
  TooFewPoints(std::size_t have, std::size_t need);
  std::size_t have;
  std::size_t need;
};

// p outside [0, 1].
struct ProbabilityOutOfRange : ValidationError {
  explicit ProbabilityOutOfRange(double p);
  double p;
};

// p outside (0, 1); thrown by methods whose quantile diverges at the ends.
struct ProbabilityOutOfOpenRange : ValidationError {
  explicit ProbabilityOutOfOpenRange(double p);
  double p;
};

struct InvertedLevels : ValidationError {
  InvertedLevels(double p_lo, double p_hi);
};

struct LengthMismatch : ValidationError {
  LengthMismatch(std::size_t a, std::size_t b);
};

// One example's predicted location/scale pair, in target units.
struct Prediction {
  double mu = 0.0;
  double sigma = 1.0;
};

// A prediction plus the observed target when it is known.
struct PredictionRecord {
  double mu = 0.0;
  double sigma = 1.0;
  std::optional<double> y;

  Prediction prediction() const { return {mu, sigma}; }
};

// Validated batch of records. labeled is true iff every record carries y.
struct PredictionSet {
  std::vector<PredictionRecord> records;
  bool labeled = false;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
};

// Sorted calibration z-scores together with their first two moments.
// var_z is the population variance (divide by L, not L - 1).
struct EmpiricalErrorDistribution {
  std::vector<double> z_sorted;
  double mean_z = 0.0;
  double var_z = 0.0;

  std::size_t size() const { return z_sorted.size(); }

  // Sorts, computes moments, rejects empty or non-finite input.
  static EmpiricalErrorDistribution from_samples(std::vector<double> z);
};

// Expected vs observed coverage at the S + 1 levels j / S, j = 0..S.
struct CalibrationCurve {
  std::vector<double> expected;
  std::vector<double> observed;
  int step_count = 0;
};

struct EvaluationReport {
  std::string method;
  double calibration_rmse = 0.0;
  double sharpness = 0.0;
  std::uint64_t trial_seed = 0;
};

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

// Checks every row for finite values and sigma > 0, preserving order.
// Throws NonFiniteValue / NonPositiveSigma with the zero-based row index.
PredictionSet validate_predictions(std::vector<PredictionRecord> rows);

// Order statistic picked for probability p over n sorted values:
// floor(p * n) clamped to [0, n - 1]. Both the empirical quantile and the
// conformal score level go through here, which keeps them bit-identical.
std::size_t order_statistic_index(double p, std::size_t n);

namespace detail {

void check_probability_closed(double p);
void check_probability_open(double p);
void check_query_sigma(double sigma);
void check_finite_target(double y);

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace detail

}  // namespace crude
