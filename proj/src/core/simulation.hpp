#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dataset.hpp"
#include "predictor.hpp"

namespace scp {

// Draws rows from N(0, Sigma) for a positive semidefinite Sigma whose only
// rank deficiency comes from groups of perfectly correlated columns. Each such
// group shares one latent standard normal; the latent covariance is factored
// by Cholesky.
class GaussianSampler {
 public:
  explicit GaussianSampler(const Eigen::MatrixXd& covariance);

  Eigen::MatrixXd draw(Eigen::Index rows, std::mt19937_64& rng) const;
  Eigen::Index dimension() const { return static_cast<Eigen::Index>(group_.size()); }
  Eigen::Index latent_dimension() const { return factor_.rows(); }

 private:
  std::vector<Eigen::Index> group_;
  Eigen::VectorXd scale_;
  Eigen::MatrixXd factor_;
};

inline constexpr int kExampleDimension = 50;

// Synthetic design y = x'beta* + sigma xi with x ~ N(0, Sigma), p = 50.
struct ExampleSpec {
  char id = 'a';
  int n = 300;  // includes the query row
  double sigma = 1.0;
  Eigen::VectorXd beta_star;
  Eigen::MatrixXd covariance;

  std::vector<int> true_support() const;  // 0-based
};

ExampleSpec make_example(char id, int n, double sigma);

struct GeneratedExample {
  Dataset data;  // n - 1 labeled rows
  Eigen::VectorXd x_new;
  double y_new = 0.0;
};

GeneratedExample generate_example(const ExampleSpec& spec, std::mt19937_64& rng);
GeneratedExample generate_example(const ExampleSpec& spec, std::uint64_t seed);

// Independent, schedule-free stream for replication `rep` of a run seeded `seed`.
std::mt19937_64 replication_rng(std::uint64_t seed, std::uint64_t rep);

struct SelectionMetrics {
  std::vector<double> frequency;  // per variable
  double precision = 0.0;         // averaged over reps with a non-empty selection
  double recall = 0.0;
};

SelectionMetrics selection_metrics(const std::vector<std::vector<int>>& selected_sets,
                                   const std::vector<int>& true_support, int dimension);

struct ExperimentConfig {
  ExampleSpec example;
  double epsilon = 0.1;
  VariantSpec variant;
  SelectionRule rule;
  int reps = 100;
  std::uint64_t seed = 1;
  bool standardize = false;
  int threads = 1;
  bool keep_traces = false;
};

struct StepTrace {
  std::vector<double> lambdas;
  std::vector<double> lengths;
};

struct ExperimentResult {
  // echo of the configuration
  char example = 'a';
  int n = 0;
  double sigma = 0.0;
  double epsilon = 0.0;
  std::string variant;
  std::string rule;
  std::uint64_t seed = 0;
  int reps = 0;

  int completed_reps = 0;   // reps - failed_reps
  int failed_reps = 0;      // numerical failures, excluded from every statistic
  int covered_reps = 0;
  int unbounded_reps = 0;   // all candidates unbounded; counted as covered with infinite length
  double validity_freq = 0.0;
  double ci_half_width = 0.0;
  double median_length = 0.0;
  double mean_length_finite = 0.0;
  SelectionMetrics selection;
  std::vector<double> length_ratios;  // per completed rep: max finite length / min length
  std::vector<double> selected_lambdas;  // per completed rep
  std::vector<std::string> errors;    // one message per failed rep
  std::vector<StepTrace> traces;      // when keep_traces
};

ExperimentResult validity_experiment(const ExperimentConfig& config);

// 1.96 * sqrt(f (1 - f) / reps)
double binomial_half_width(double frequency, int reps);

// Coverage of the fixed-lambda refit predictor over independent draws.
struct FixedLambdaStudy {
  double lambda = 0.0;
  int reps = 0;
  int covered = 0;
  double coverage = 0.0;
  double median_length = 0.0;
};

FixedLambdaStudy fixed_lambda_experiment(const ExampleSpec& example, double epsilon, double lambda, int reps,
                                         std::uint64_t seed, int threads = 1);

// Median of the data-driven lambda_nu over a short pilot run.
double pilot_lambda(const ExperimentConfig& config);

}  // namespace scp
