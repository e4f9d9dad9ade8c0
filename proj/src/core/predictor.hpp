#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "conformal.hpp"
#include "dataset.hpp"
#include "interval_set.hpp"
#include "path_solver.hpp"

namespace scp {

enum class VariantKind { CoLP, CoRP, CoRLaP, CENeP, CoSmoLaP };

struct VariantSpec {
  VariantKind kind = VariantKind::CoLP;
  // mu of the elastic-net / smooth-lasso quadratic term
  double penalty_weight = 1.0;
  // Ridge weight for CoRP/CoRLaP; unset means "use lambda_k at step k".
  std::optional<double> ridge_weight;
  // CENeP/CoSmoLaP offset is -lambda_k x(x'x)^{-1}s by default; when set it
  // uses lambda_k / 2 as CoLP does.
  bool halve_penalty_offset = false;
};

enum class RuleKind { Smallest, EarlyStopped, NPreviousNeighbors };

struct SelectionRule {
  RuleKind kind = RuleKind::Smallest;
  double early_stop_factor = 10.0;
  int neighbors = 2;
};

struct CandidateSet {
  double lambda = 0.0;
  std::vector<int> active_set;
  AffineScore scores;
  IntervalSet set;
  double length = 0.0;
};

struct PredictorFamily {
  std::vector<CandidateSet> sets;
  std::optional<std::size_t> selected;
  std::optional<RuleKind> rule;
  std::optional<std::size_t> stopped_at;  // first index dropped by early stopping
  IntervalSet final_set;
};

const char* to_string(VariantKind kind) noexcept;
const char* to_string(RuleKind kind) noexcept;
std::optional<VariantKind> parse_variant(const std::string& name);
std::optional<RuleKind> parse_rule(const std::string& name);

// Score model of `variant` at one path step, with the step's active set and
// signs held fixed.
ScoreModel make_score_model(const AugmentedProblem& problem, const PathStep& step,
                            const VariantSpec& variant);

// Path on the labeled rows only, then one conformal set per transition point.
PredictorFamily build_family(const Dataset& data, const Eigen::VectorXd& x_new, double epsilon,
                             const VariantSpec& variant, int threads = 1);

// First k with length_k > factor * length_{k-1}, if any.
std::optional<std::size_t> early_stop_index(const std::vector<double>& lengths, double factor);

PredictorFamily select_smallest(PredictorFamily family);
PredictorFamily select_early_stopped(PredictorFamily family, double factor = 10.0);
PredictorFamily select_n_previous_neighbors(PredictorFamily family, int neighbors,
                                            double factor = 10.0);
PredictorFamily apply_rule(PredictorFamily family, const SelectionRule& rule);

struct PredictOptions {
  double epsilon = 0.1;
  VariantSpec variant;
  SelectionRule rule;
  bool standardize = false;
  int threads = 1;
  std::optional<double> true_label;
};

struct PredictionReport {
  IntervalSet final_set;
  double length = 0.0;
  std::size_t selected_index = 0;
  double selected_lambda = 0.0;
  std::vector<int> active_variables;  // 0-based
  std::vector<double> lambdas;
  std::vector<double> lengths;
  std::vector<bool> stopped;  // step lies at or past the early-stopping point
  std::optional<std::size_t> early_stop_at;
  bool beyond_early_stop = false;
  std::vector<double> true_label_p_values;  // per step, empty without a label
  std::optional<bool> covered;
  std::vector<std::string> warnings;
};

PredictionReport predict(const Dataset& data, const Eigen::VectorXd& x_new, const PredictOptions& options);

}  // namespace scp
