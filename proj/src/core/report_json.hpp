#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "interval_set.hpp"
#include "path_solver.hpp"
#include "predictor.hpp"
#include "simulation.hpp"

namespace scp {

struct StepSummary {
  double lambda = 0.0;
  double length = 0.0;
  bool stopped = false;
  friend bool operator==(const StepSummary&, const StepSummary&) = default;
};

// Serialized outcome of one `predict` run. Variable indices are 1-based.
struct PredictionReportDocument {
  double epsilon = 0.1;
  std::string variant = "colp";
  std::string rule = "smallest";
  double penalty_weight = 1.0;
  std::optional<double> ridge_weight;  // empty: lambda_k, written as "lambda_k"
  int neighbors = 2;
  double early_stop_factor = 10.0;
  bool standardize = false;
  double selected_lambda = 0.0;
  std::size_t selected_step_index = 1;  // 1-based
  std::vector<int> active_variables;
  std::vector<Interval> intervals;
  double lebesgue_length = 0.0;
  std::vector<StepSummary> per_step;
  std::optional<std::size_t> early_stop_index;  // 1-based
  bool beyond_early_stop = false;
  std::optional<std::size_t> query_row;  // 1-based data row
  std::optional<double> true_label;
  std::optional<bool> covered;
  std::vector<std::string> warnings;
  std::uint64_t seed = 0;
  std::string software_version;

  friend bool operator==(const PredictionReportDocument&, const PredictionReportDocument&) = default;
};

PredictionReportDocument make_report_document(const PredictionReport& report, const PredictOptions& options,
                                              std::uint64_t seed);

// Doubles: 17 significant digits; +-inf as "inf"/"-inf"; NaN as null.
std::string dump_json(const nlohmann::json& value, int indent = 2);
nlohmann::json encode_real(double value);
double decode_real(const nlohmann::json& value);

nlohmann::json to_json(const PredictionReportDocument& doc);
PredictionReportDocument report_from_json(const nlohmann::json& value);

nlohmann::json to_json(const ExperimentResult& result);
nlohmann::json to_json(const SolutionPath& path, const Dataset& data);

// rep,step,lambda,length rows for plotting per-step length traces.
std::string traces_csv(const ExperimentResult& result);

// Writes via a sibling temporary file and rename.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace scp
