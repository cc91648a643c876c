#pragma once

#include <string>

#include "json.hpp"
#include "riskcal/experiment.hpp"
#include "riskcal/losses.hpp"
#include "riskcal/metrics.hpp"
#include "riskcal/model.hpp"

namespace riskcal {

nlohmann::json loss_config_to_json(const LossConfig& config);
LossConfig loss_config_from_json(const nlohmann::json& j);
LossConfig load_loss_config_file(const std::string& path);

nlohmann::json report_to_json(const TaxonomyReport& report);
TaxonomyReport report_from_json(const nlohmann::json& j);

nlohmann::json epoch_record_to_json(const EpochRecord& record);
EpochRecord epoch_record_from_json(const nlohmann::json& j);

/// Trained-model document: architecture, dims, row-major parameter arrays
/// and the training configuration that produced it.
nlohmann::json model_to_json(const Classifier& model, const TrainConfig& config,
                             const LossConfig& loss_config);

ExperimentSpec experiment_spec_from_json(const nlohmann::json& j);
ExperimentSpec load_experiment_spec_file(const std::string& path);

nlohmann::json comparison_to_json(const ComparisonResult& result);
ComparisonResult comparison_from_json(const nlohmann::json& j);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);
nlohmann::json load_json_file(const std::string& path);

}  // namespace riskcal
