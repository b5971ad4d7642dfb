#pragma once

#include <filesystem>

#include "json.hpp"

#include "crude/conformal.hpp"
#include "crude/recalibrator.hpp"

namespace crude {

// On-disk model documents. A crude model is a bare
// {"z_sorted": [...], "mean_z": ..., "var_z": ...} object with no "method"
// key; every other kind carries "method". Doubles survive a save/load cycle
// bit for bit.

nlohmann::json crude_model_to_json(const CrudeModel& model);
nlohmann::json gaussian_mle_to_json(const GaussianMleModel& model);
nlohmann::json kuleshov_to_json(const KuleshovModel& model);
nlohmann::json conformal_to_json(const ConformalCalibration& calib);
nlohmann::json identity_to_json();

CrudeModel crude_model_from_json(const nlohmann::json& doc);
GaussianMleModel gaussian_mle_from_json(const nlohmann::json& doc);
KuleshovModel kuleshov_from_json(const nlohmann::json& doc);
ConformalCalibration conformal_from_json(const nlohmann::json& doc);

// "none" | "crude" | "gaussian_mle" | "kuleshov" | "conformal".
std::string stored_model_method(const nlohmann::json& doc);

// Any stored model as the uniform query interface; conformal scores load as
// the equivalent empirical law.
Recalibrator recalibrator_from_json(const nlohmann::json& doc);

nlohmann::json report_to_json(const EvaluationReport& report);
EvaluationReport report_from_json(const nlohmann::json& doc);

void save_json(const nlohmann::json& doc, const std::filesystem::path& path);
nlohmann::json load_json(const std::filesystem::path& path);

}  // namespace crude
