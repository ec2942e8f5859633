#pragma once

#include "twoarm/simharness.hpp"
#include "twoarm/types.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace twoarm::io {

using nlohmann::json;

// Matrices: CSV is row-major with a header row of column indices; JSON is
// {"n": rows, "data": [[...]]}.
std::string matrix_to_csv(const Eigen::Ref<const MatrixXd>& m);
json matrix_to_json(const Eigen::Ref<const MatrixXd>& m);
MatrixXd matrix_from_json(const json& j);

json allocation_to_json(const Allocation& w);
Allocation allocation_from_json(const json& j);

json pairset_to_json(const PairSet& p);
json design_to_json(const DesignDistribution& d);
json report_to_json(const CriterionReport& r);

json scenario_config_to_json(const ScenarioConfig& cfg);
ScenarioConfig scenario_config_from_json(const json& j);
json scenario_result_to_json(const ScenarioResult& r);
ScenarioResult scenario_result_from_json(const json& j);

std::string density_to_csv(const std::vector<DensityRow>& rows);
std::string mse_samples_to_csv(const Eigen::Ref<const VectorXd>& samples);
std::string summary_to_csv(const std::vector<DesignSummary>& summaries);

// Covariate input: headerless numeric CSV (an optional non-numeric header
// row is skipped) or a JSON matrix, auto-detected by extension.
CovariateMatrix load_covariates(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace twoarm::io
