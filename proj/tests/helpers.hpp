#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "crude/core.hpp"

namespace testutil {

inline crude::PredictionSet make_set(
    const std::vector<std::tuple<double, double, std::optional<double>>>& rows) {
  std::vector<crude::PredictionRecord> records;
  records.reserve(rows.size());
  for (const auto& [mu, sigma, y] : rows) records.push_back({mu, sigma, y});
  return crude::validate_predictions(std::move(records));
}

// Labeled set with unit (mu, sigma) whose z-scores are exactly zs.
inline crude::PredictionSet set_from_z(const std::vector<double>& zs) {
  std::vector<crude::PredictionRecord> records;
  records.reserve(zs.size());
  for (double z : zs) records.push_back({0.0, 1.0, z});
  return crude::validate_predictions(std::move(records));
}

// Scratch directory under the system temp root, wiped on construction and
// removed on destruction.
struct TempDir {
  std::filesystem::path path;

  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() / ("crude_test_" + tag);
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path file(const std::string& name) const { return path / name; }
};

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::trunc | std::ios::binary);
  out << content;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// One-sample Kolmogorov-Smirnov statistic against Uniform(0, 1).
inline double ks_uniform(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double lo = values[i] - static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n - values[i];
    d = std::max({d, lo, hi});
  }
  return d;
}

}  // namespace testutil
