#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "hermit/dataset.hpp"
#include "hermit/datagen.hpp"
#include "hermit/moe.hpp"
#include "hermit/model.hpp"
#include "hermit/penalty.hpp"
#include "hermit/solver.hpp"

namespace hermit {

// Dataset CSV: header row, feature columns before target columns, empty cell
// or "NaN" marks a missing target.  The JSON sidecar gives the column split
// and the per-target family strings:
//   {"num_features": d, "families": ["gaussian", ...], "dispersions": [...]}
// (dispersions optional, Gaussian only).
void write_dataset_csv(const std::string& csv_path, const Dataset& data);
void write_tasks_json(const std::string& path, const Dataset& data);
Dataset read_dataset_csv(const std::string& csv_path, const std::string& tasks_json_path);

// Plain numeric matrix with a header row; empty cells and "NaN" read as NaN.
Eigen::MatrixXd read_matrix_csv(const std::string& path);

nlohmann::json model_to_json(const MixtureModel& model, const GatingModel* gate = nullptr);
MixtureModel model_from_json(const nlohmann::json& j,
                             std::optional<GatingModel>* gate_out = nullptr);
void save_model(const std::string& path, const MixtureModel& model,
                const GatingModel* gate = nullptr);
MixtureModel load_model(const std::string& path,
                        std::optional<GatingModel>* gate_out = nullptr);

PenaltyConfig penalty_config_from_json(const nlohmann::json& j);
nlohmann::json penalty_config_to_json(const PenaltyConfig& cfg);

FitConfig fit_config_from_json(const nlohmann::json& j);
nlohmann::json fit_report_to_json(const FitReport& report);

SynthSpec synth_spec_from_json(const nlohmann::json& j);
nlohmann::json ground_truth_to_json(const GroundTruth& truth);

nlohmann::json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace hermit
