#include "crude/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>
#include <string_view>
#include <utility>

namespace crude {

FileNotFound::FileNotFound(const std::string& path)
    : ValidationError("file not found: " + path) {}

ParseError::ParseError(std::size_t row_, const std::string& column_, const std::string& detail)
    : ValidationError("csv row " + std::to_string(row_) + ", column " + column_ + ": " + detail),
      row(row_),
      column(column_) {}

KTooLarge::KTooLarge(std::size_t k, std::size_t n)
    : ValidationError("k = " + std::to_string(k) + " exceeds training size " +
                      std::to_string(n)) {}

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::next_unit() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double SplitMix64::next_unit_open() {
  return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
}

std::uint64_t SplitMix64::next_below(std::uint64_t bound) {
  if (bound == 0) throw ValidationError("bound must be positive");
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = next();
    if (r >= threshold) return r % bound;
  }
}

double SplitMix64::next_normal() {
  const double u1 = next_unit_open();
  const double u2 = next_unit();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  SplitMix64 mixer(seed + 0x9E3779B97F4A7C15ULL * (stream + 1));
  return mixer.next();
}

ErrorFamily parse_family(const std::string& name) {
  if (name == "gaussian") return ErrorFamily::kGaussian;
  if (name == "lognormal_shifted") return ErrorFamily::kLognormalShifted;
  if (name == "student_t") return ErrorFamily::kStudentT;
  throw InvalidFamilyParams("unknown error family: " + name);
}

std::string family_name(ErrorFamily family) {
  switch (family) {
    case ErrorFamily::kGaussian: return "gaussian";
    case ErrorFamily::kLognormalShifted: return "lognormal_shifted";
    case ErrorFamily::kStudentT: return "student_t";
  }
  throw Error("unreachable family");
}

namespace {

// Marsaglia-Tsang; needs alpha >= 1, which nu > 2 guarantees here.
double sample_gamma(double alpha, SplitMix64& rng) {
  const double d = alpha - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = rng.next_normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.next_unit_open();
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
  }
}

double resolve_family_param(ErrorFamily family, double param) {
  switch (family) {
    case ErrorFamily::kGaussian:
      return 0.0;
    case ErrorFamily::kLognormalShifted:
      if (param == 0.0) return 0.5;
      if (!std::isfinite(param) || param <= 0.0) {
        throw InvalidFamilyParams("lognormal log-scale must be positive");
      }
      return param;
    case ErrorFamily::kStudentT:
      if (param == 0.0) return 5.0;
      if (!std::isfinite(param) || param <= 2.0) {
        throw InvalidFamilyParams("student-t dof must exceed 2");
      }
      return param;
  }
  throw Error("unreachable family");
}

}  // namespace

double sample_standardized_error(ErrorFamily family, double family_param, SplitMix64& rng) {
  const double param = resolve_family_param(family, family_param);
  switch (family) {
    case ErrorFamily::kGaussian:
      return rng.next_normal();
    case ErrorFamily::kLognormalShifted: {
      const double s = param;
      const double w = std::exp(s * rng.next_normal());
      const double mean = std::exp(0.5 * s * s);
      const double var = (std::exp(s * s) - 1.0) * std::exp(s * s);
      return (w - mean) / std::sqrt(var);
    }
    case ErrorFamily::kStudentT: {
      const double nu = param;
      const double z = rng.next_normal();
      const double chi2 = 2.0 * sample_gamma(0.5 * nu, rng);
      const double t = z / std::sqrt(chi2 / nu);
      return t * std::sqrt((nu - 2.0) / nu);
    }
  }
  throw Error("unreachable family");
}

SyntheticData synth_generate(const SyntheticConfig& config) {
  if (config.n == 0) throw EmptySet("synthetic dataset");
  if (!std::isfinite(config.miscal_scale) || config.miscal_scale <= 0.0) {
    throw ValidationError("miscal_scale must be positive");
  }
  const double param = resolve_family_param(config.family, config.family_param);

  SplitMix64 rng(config.seed);
  std::vector<PredictionRecord> rows;
  rows.reserve(config.n);
  SyntheticData data;
  data.x.reserve(config.n);
  data.sigma_true.reserve(config.n);
  for (std::size_t i = 0; i < config.n; ++i) {
    const double x = rng.next_unit();
    double mu = 1.0;
    double sigma_true = 2.0;
    if (config.hetero) {
      mu = 2.0 * std::sin(2.0 * std::numbers::pi * x) + 3.0 * x;
      const double sx = std::sin(std::numbers::pi * x);
      sigma_true = 0.5 + sx * sx;
    }
    const double z = sample_standardized_error(config.family, param, rng);
    PredictionRecord r;
    r.mu = mu;
    r.sigma = sigma_true * config.miscal_scale;
    r.y = mu + z * sigma_true;
    rows.push_back(r);
    data.x.push_back(x);
    data.sigma_true.push_back(sigma_true);
  }
  data.predictions = validate_predictions(std::move(rows));
  return data;
}

void validate_split_spec(const SplitSpec& spec) {
  for (double f : {spec.train_frac, spec.cal_frac, spec.test_frac}) {
    if (!std::isfinite(f) || f <= 0.0) {
      throw ValidationError("split fractions must be positive");
    }
  }
  if (std::abs(spec.train_frac + spec.cal_frac + spec.test_frac - 1.0) > 1e-9) {
    throw ValidationError("split fractions must sum to 1");
  }
  if (spec.trials < 1) throw ValidationError("trials must be at least 1");
}

SplitIndices split_indices(std::size_t n, const SplitSpec& spec, std::uint32_t trial) {
  validate_split_spec(spec);
  if (trial >= spec.trials) {
    throw ValidationError("trial " + std::to_string(trial) + " outside 0.." +
                          std::to_string(spec.trials - 1));
  }
  if (n == 0) throw EmptySet("split input");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  SplitMix64 rng(mix_seed(spec.seed, trial));
  for (std::size_t i = n; i > 1; --i) {
    const std::uint64_t j = rng.next_below(i);
    std::swap(order[i - 1], order[static_cast<std::size_t>(j)]);
  }

  const auto n_train = static_cast<std::size_t>(std::floor(spec.train_frac * static_cast<double>(n)));
  const auto n_cal = static_cast<std::size_t>(std::floor(spec.cal_frac * static_cast<double>(n)));
  if (n_train == 0 || n_cal == 0 || n_train + n_cal >= n) {
    throw EmptyPartition("split would leave an empty partition for n = " + std::to_string(n));
  }

  SplitIndices out;
  out.train.assign(order.begin(), order.begin() + n_train);
  out.cal.assign(order.begin() + n_train, order.begin() + n_train + n_cal);
  out.test.assign(order.begin() + n_train + n_cal, order.end());
  return out;
}

PredictionSet subset(const PredictionSet& s, const std::vector<std::size_t>& indices) {
  std::vector<PredictionRecord> rows;
  rows.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= s.size()) throw ValidationError("subset index out of range");
    rows.push_back(s.records[i]);
  }
  return validate_predictions(std::move(rows));
}

SplitSets split(const PredictionSet& s, const SplitSpec& spec, std::uint32_t trial) {
  const auto idx = split_indices(s.size(), spec, trial);
  return {subset(s, idx.train), subset(s, idx.cal), subset(s, idx.test)};
}

KnnPredictor fit_knn(std::vector<std::vector<double>> xs, std::vector<double> ys, std::size_t k) {
  if (xs.size() != ys.size()) throw LengthMismatch(xs.size(), ys.size());
  if (xs.empty()) throw EmptySet("knn training set");
  if (k < 2) throw ValidationError("k must be at least 2");
  if (k > xs.size()) throw KTooLarge(k, xs.size());
  const std::size_t dim = xs.front().size();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i].size() != dim) throw LengthMismatch(xs[i].size(), dim);
    for (double v : xs[i]) {
      if (!std::isfinite(v)) throw NonFiniteValue(i);
    }
    if (!std::isfinite(ys[i])) throw NonFiniteValue(i);
  }
  return {std::move(xs), std::move(ys), k};
}

Prediction knn_predict(const KnnPredictor& model, const std::vector<double>& x) {
  const std::size_t n = model.train_y.size();
  if (n == 0) throw EmptySet("knn training set");
  if (model.k < 2) throw ValidationError("k must be at least 2");
  if (model.k > n) throw KTooLarge(model.k, n);

  std::vector<std::pair<double, std::size_t>> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = model.train_x[i];
    if (row.size() != x.size()) throw LengthMismatch(row.size(), x.size());
    double d2 = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) {
      const double d = row[j] - x[j];
      d2 += d * d;
    }
    dist[i] = {d2, i};
  }
  std::partial_sort(dist.begin(), dist.begin() + model.k, dist.end());

  double sum = 0.0;
  for (std::size_t i = 0; i < model.k; ++i) sum += model.train_y[dist[i].second];
  const double mu = sum / static_cast<double>(model.k);
  double ss = 0.0;
  for (std::size_t i = 0; i < model.k; ++i) {
    const double d = model.train_y[dist[i].second] - mu;
    ss += d * d;
  }
  const double sigma = std::sqrt(ss / static_cast<double>(model.k));
  return {mu, std::max(sigma, kMinKnnSigma)};
}

namespace {

std::string_view trim_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      out.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

double parse_field(std::string_view tok, std::size_t row, const char* column) {
  double v = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (tok.empty() || res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
    throw ParseError(row, column, "not a number: '" + std::string(tok) + "'");
  }
  return v;
}

constexpr std::string_view kDumpHeader = "x,mu,sigma_reported,sigma_true,y";

PredictionSet parse_prediction_body(bool has_y, std::istream& in) {
  std::vector<PredictionRecord> rows;
  std::string line;
  std::size_t rownum = 0;
  while (std::getline(in, line)) {
    const auto l = trim_cr(line);
    if (l.empty()) continue;
    ++rownum;
    const auto fields = split_fields(l);
    const std::size_t expected = has_y ? 3 : 2;
    if (fields.size() != expected && !(has_y && fields.size() == 2)) {
      throw ParseError(rownum, "row",
                       "expected " + std::to_string(expected) + " fields, got " +
                           std::to_string(fields.size()));
    }
    PredictionRecord r;
    r.mu = parse_field(fields[0], rownum, "mu");
    r.sigma = parse_field(fields[1], rownum, "sigma");
    if (has_y && fields.size() == 3 && !fields[2].empty()) {
      r.y = parse_field(fields[2], rownum, "y");
    }
    rows.push_back(r);
  }
  return validate_predictions(std::move(rows));
}

}  // namespace

PredictionSet parse_prediction_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(0, "header", "missing header");
  const auto header = trim_cr(line);
  if (header == "mu,sigma,y") return parse_prediction_body(true, in);
  if (header == "mu,sigma") return parse_prediction_body(false, in);
  throw ParseError(0, "header", "expected 'mu,sigma[,y]', got '" + std::string(header) + "'");
}

PredictionSet load_prediction_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFound(path.string());
  return parse_prediction_csv(in);
}

void write_prediction_csv(const PredictionSet& s, std::ostream& out) {
  const bool any_y =
      std::any_of(s.records.begin(), s.records.end(), [](const auto& r) { return r.y.has_value(); });
  out << (any_y ? "mu,sigma,y\n" : "mu,sigma\n");
  for (const auto& r : s.records) {
    out << detail::format_double(r.mu) << ',' << detail::format_double(r.sigma);
    if (any_y) {
      out << ',';
      if (r.y) out << detail::format_double(*r.y);
    }
    out << '\n';
  }
}

Dataset parse_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(0, "header", "missing header");
  const auto header = trim_cr(line);

  Dataset data;
  if (header == "mu,sigma,y") {
    data.predictions = parse_prediction_body(true, in);
    return data;
  }
  if (header == "mu,sigma") {
    data.predictions = parse_prediction_body(false, in);
    return data;
  }
  if (header != kDumpHeader) {
    throw ParseError(0, "header", "unrecognized header '" + std::string(header) + "'");
  }

  std::vector<PredictionRecord> rows;
  std::size_t rownum = 0;
  while (std::getline(in, line)) {
    const auto l = trim_cr(line);
    if (l.empty()) continue;
    ++rownum;
    const auto fields = split_fields(l);
    if (fields.size() != 5) {
      throw ParseError(rownum, "row", "expected 5 fields, got " + std::to_string(fields.size()));
    }
    data.x.push_back(parse_field(fields[0], rownum, "x"));
    PredictionRecord r;
    r.mu = parse_field(fields[1], rownum, "mu");
    r.sigma = parse_field(fields[2], rownum, "sigma_reported");
    data.sigma_true.push_back(parse_field(fields[3], rownum, "sigma_true"));
    r.y = parse_field(fields[4], rownum, "y");
    rows.push_back(r);
  }
  data.predictions = validate_predictions(std::move(rows));
  return data;
}

Dataset load_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFound(path.string());
  return parse_dataset_csv(in);
}

void write_synthetic_csv(const SyntheticData& data, std::ostream& out) {
  const auto n = data.predictions.size();
  if (data.x.size() != n) throw LengthMismatch(data.x.size(), n);
  if (data.sigma_true.size() != n) throw LengthMismatch(data.sigma_true.size(), n);
  out << kDumpHeader << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = data.predictions.records[i];
    out << detail::format_double(data.x[i]) << ',' << detail::format_double(r.mu) << ','
        << detail::format_double(r.sigma) << ',' << detail::format_double(data.sigma_true[i])
        << ',' << detail::format_double(r.y.value()) << '\n';
  }
}

}  // namespace crude
