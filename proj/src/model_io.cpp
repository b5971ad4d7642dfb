#include "crude/model_io.hpp"

#include <algorithm>
#include <fstream>

#include "crude/data.hpp"

namespace crude {

namespace {

using nlohmann::json;

std::vector<double> require_doubles(const json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_array()) {
    throw ValidationError(std::string("model json: missing array '") + key + "'");
  }
  std::vector<double> out;
  out.reserve(doc[key].size());
  for (const auto& v : doc[key]) {
    if (!v.is_number()) throw ValidationError(std::string("model json: '") + key + "' has a non-numeric entry");
    out.push_back(v.get<double>());
  }
  return out;
}

double require_double(const json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_number()) {
    throw ValidationError(std::string("model json: missing number '") + key + "'");
  }
  return doc[key].get<double>();
}

}  // namespace

nlohmann::json crude_model_to_json(const CrudeModel& model) {
  const auto& d = model.dist();
  return {{"z_sorted", d.z_sorted}, {"mean_z", d.mean_z}, {"var_z", d.var_z}};
}

nlohmann::json gaussian_mle_to_json(const GaussianMleModel& model) {
  return {{"method", "gaussian_mle"}, {"m", model.m}, {"s", model.s}};
}

nlohmann::json kuleshov_to_json(const KuleshovModel& model) {
  return {{"method", "kuleshov"}, {"iso_x", model.iso_x}, {"iso_y", model.iso_y}};
}

nlohmann::json conformal_to_json(const ConformalCalibration& calib) {
  return {{"method", "conformal"}, {"scores", calib.scores}};
}

nlohmann::json identity_to_json() { return {{"method", "none"}}; }

CrudeModel crude_model_from_json(const nlohmann::json& doc) {
  EmpiricalErrorDistribution dist;
  dist.z_sorted = require_doubles(doc, "z_sorted");
  dist.mean_z = require_double(doc, "mean_z");
  dist.var_z = require_double(doc, "var_z");
  if (!std::is_sorted(dist.z_sorted.begin(), dist.z_sorted.end())) {
    throw ValidationError("model json: z_sorted is not sorted");
  }
  return CrudeModel(std::move(dist));
}

GaussianMleModel gaussian_mle_from_json(const nlohmann::json& doc) {
  GaussianMleModel model{require_double(doc, "m"), require_double(doc, "s")};
  if (!(model.s > 0.0)) throw ValidationError("model json: s must be positive");
  return model;
}

KuleshovModel kuleshov_from_json(const nlohmann::json& doc) {
  KuleshovModel model{require_doubles(doc, "iso_x"), require_doubles(doc, "iso_y")};
  if (model.iso_x.size() != model.iso_y.size()) {
    throw LengthMismatch(model.iso_x.size(), model.iso_y.size());
  }
  if (model.iso_x.size() < 2) throw ValidationError("model json: too few isotonic knots");
  for (std::size_t i = 0; i + 1 < model.iso_x.size(); ++i) {
    if (!(model.iso_x[i] < model.iso_x[i + 1])) {
      throw ValidationError("model json: iso_x must be strictly increasing");
    }
    if (model.iso_y[i] > model.iso_y[i + 1]) {
      throw ValidationError("model json: iso_y must be non-decreasing");
    }
  }
  return model;
}

ConformalCalibration conformal_from_json(const nlohmann::json& doc) {
  auto scores = require_doubles(doc, "scores");
  if (!std::is_sorted(scores.begin(), scores.end())) {
    throw ValidationError("model json: scores are not sorted");
  }
  if (scores.empty()) throw EmptySet("conformal calibration");
  return ConformalCalibration{std::move(scores)};
}

std::string stored_model_method(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ValidationError("model json: expected an object");
  if (!doc.contains("method")) {
    if (doc.contains("z_sorted")) return "crude";
    throw ValidationError("model json: missing 'method'");
  }
  const auto& m = doc["method"];
  if (!m.is_string()) throw ValidationError("model json: 'method' must be a string");
  return m.get<std::string>();
}

Recalibrator recalibrator_from_json(const nlohmann::json& doc) {
  const std::string method = stored_model_method(doc);
  if (method == "crude") return Recalibrator::from_crude(crude_model_from_json(doc));
  if (method == "gaussian_mle") {
    return Recalibrator::from_gaussian_mle(gaussian_mle_from_json(doc));
  }
  if (method == "kuleshov") return Recalibrator::from_kuleshov(kuleshov_from_json(doc));
  if (method == "conformal") return Recalibrator::from_conformal(conformal_from_json(doc));
  if (method == "none") return Recalibrator::identity();
  throw ValidationError("model json: unknown method '" + method + "'");
}

nlohmann::json report_to_json(const EvaluationReport& report) {
  return {{"method", report.method},
          {"calibration_rmse", report.calibration_rmse},
          {"sharpness", report.sharpness},
          {"seed", report.trial_seed}};
}

EvaluationReport report_from_json(const nlohmann::json& doc) {
  EvaluationReport report;
  if (!doc.contains("method") || !doc["method"].is_string()) {
    throw ValidationError("report json: missing 'method'");
  }
  report.method = doc["method"].get<std::string>();
  report.calibration_rmse = require_double(doc, "calibration_rmse");
  report.sharpness = require_double(doc, "sharpness");
  if (!doc.contains("seed") || !doc["seed"].is_number_unsigned()) {
    throw ValidationError("report json: missing 'seed'");
  }
  report.trial_seed = doc["seed"].get<std::uint64_t>();
  return report;
}

void save_json(const nlohmann::json& doc, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw Error("write failed: " + path.string());
}

nlohmann::json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFound(path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("json parse error in " + path.string() + ": " + e.what());
  }
}

}  // namespace crude
