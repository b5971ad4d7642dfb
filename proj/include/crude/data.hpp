#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "crude/core.hpp"

namespace crude {

struct FileNotFound : ValidationError {
  explicit FileNotFound(const std::string& path);
};

struct ParseError : ValidationError {
  ParseError(std::size_t row, const std::string& column, const std::string& detail);
  std::size_t row;
  std::string column;
};

struct InvalidFamilyParams : ValidationError {
  using ValidationError::ValidationError;
};

struct KTooLarge : ValidationError {
  KTooLarge(std::size_t k, std::size_t n);
};

struct EmptyPartition : ValidationError {
  using ValidationError::ValidationError;
};

// Fixed 64-bit generator (splitmix64): identical streams on every platform,
// no libstdc++ distribution dependence anywhere.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();

  // Uniform on [0, 1), 53 random bits.
  double next_unit();

  // Uniform on (0, 1]; safe as a log() argument.
  double next_unit_open();

  // Uniform integer in [0, bound); unbiased via rejection.
  std::uint64_t next_below(std::uint64_t bound);

  // Standard normal draw (Box-Muller, two uniforms per call).
  double next_normal();

 private:
  std::uint64_t state_;
};

// Decorrelates per-trial streams from one user-facing seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

enum class ErrorFamily { kGaussian, kLognormalShifted, kStudentT };

// Synthetic process: y = mu + z * sigma_true with z standardized to mean 0,
// variance 1 within its family; the recorded sigma is sigma_true scaled by
// miscal_scale. family_param is the lognormal log-scale s (> 0) or the
// Student-t dof nu (> 2); ignored for the Gaussian family.
struct SyntheticConfig {
  std::size_t n = 0;
  ErrorFamily family = ErrorFamily::kGaussian;
  double family_param = 0.0;  // 0 means the family default (s = 0.5, nu = 5)
  bool hetero = false;
  double miscal_scale = 1.0;
  std::uint64_t seed = 0;
};

struct SyntheticData {
  PredictionSet predictions;  // mu, sigma_true * miscal_scale, y
  std::vector<double> x;
  std::vector<double> sigma_true;
};

ErrorFamily parse_family(const std::string& name);
std::string family_name(ErrorFamily family);

// One standardized error draw. Exposed so the moment contracts are testable
// without going through a full dataset.
double sample_standardized_error(ErrorFamily family, double family_param, SplitMix64& rng);

SyntheticData synth_generate(const SyntheticConfig& config);

struct SplitSpec {
  double train_frac = 0.5;
  double cal_frac = 0.4;
  double test_frac = 0.1;
  std::uint64_t seed = 0;
  std::uint32_t trials = 20;
};

// Fractions must be positive and sum to 1 within 1e-9.
void validate_split_spec(const SplitSpec& spec);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> cal;
  std::vector<std::size_t> test;
};

// Shuffles 0..n-1 (Fisher-Yates on the trial's stream) and cuts it into
// floor(n * train_frac), floor(n * cal_frac) and the remainder. Throws
// EmptyPartition when any piece would be empty. trial must be below
// spec.trials.
SplitIndices split_indices(std::size_t n, const SplitSpec& spec, std::uint32_t trial);

PredictionSet subset(const PredictionSet& s, const std::vector<std::size_t>& indices);

struct SplitSets {
  PredictionSet train;
  PredictionSet cal;
  PredictionSet test;
};

SplitSets split(const PredictionSet& s, const SplitSpec& spec, std::uint32_t trial);

// Mean of the k nearest training targets, population-std scale floored at
// 1e-6. Ties in distance break toward the lower training index.
struct KnnPredictor {
  std::vector<std::vector<double>> train_x;
  std::vector<double> train_y;
  std::size_t k = 2;
};

inline constexpr double kMinKnnSigma = 1e-6;

KnnPredictor fit_knn(std::vector<std::vector<double>> xs, std::vector<double> ys, std::size_t k);

Prediction knn_predict(const KnnPredictor& model, const std::vector<double>& x);

// Prediction CSV: header "mu,sigma,y" or "mu,sigma"; an empty/missing y
// field makes the row unlabeled. Synthetic dumps use the header
// "x,mu,sigma_reported,sigma_true,y" and load_dataset_csv accepts either.
struct Dataset {
  PredictionSet predictions;
  std::vector<double> x;           // empty unless the file was a synthetic dump
  std::vector<double> sigma_true;  // likewise
};

PredictionSet parse_prediction_csv(std::istream& in);
PredictionSet load_prediction_csv(const std::filesystem::path& path);
void write_prediction_csv(const PredictionSet& s, std::ostream& out);

Dataset parse_dataset_csv(std::istream& in);
Dataset load_dataset_csv(const std::filesystem::path& path);

void write_synthetic_csv(const SyntheticData& data, std::ostream& out);

}  // namespace crude
