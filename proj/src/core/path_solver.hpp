#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dataset.hpp"

namespace scp {

// One transition point of a piecewise-linear regularization path. Indices are
// 0-based column indices, kept sorted ascending; `signs` and `beta` are
// aligned with `active_set`. `beta` is the estimate at exactly `lambda`, so a
// variable that enters at this knot has a zero coefficient.
struct PathStep {
  double lambda = 0.0;
  std::vector<int> active_set;
  std::vector<int> signs;
  Eigen::VectorXd beta;

  Eigen::VectorXd sign_vector() const;
};

struct SolutionPath {
  std::vector<PathStep> steps;   // strictly decreasing lambda
  double terminal_lambda = 0.0;  // 0 once the least-squares end is reached
};

enum class PenaltyKind { Identity, FusedDifference };

struct PenaltyMatrixSpec {
  PenaltyKind kind = PenaltyKind::Identity;
  double weight = 0.0;
};

struct PathOptions {
  // Columns whose entry would push cond(X_A'X_A) past this are skipped.
  double condition_limit = 1e10;
  // Relative tolerance under which two knots are treated as one.
  double knot_tolerance = 1e-10;
};

// Minimizer of ||y - X b||^2 + lambda * s'b for a fixed sign pattern s:
// (X'X)^{-1} (X'y - lambda/2 s). Throws SingularGram when cond(X'X) exceeds
// `condition_limit`.
Eigen::VectorXd lasso_closed_form(const Eigen::MatrixXd& X_active, const Eigen::VectorXd& y,
                                  double lambda, const Eigen::VectorXd& signs,
                                  double condition_limit = 1e10);

// LASSO modification of LARS on the objective ||y - X b||^2 + lambda ||b||_1.
SolutionPath lars_lasso_path(const Dataset& data, const PathOptions& options = {});

// Path of ||y - X b||^2 + mu b'Pb + lambda ||b||_1 via the augmented design
// [X; sqrt(mu) R] with R'R = P and a zero-padded response.
SolutionPath penalized_path(const Dataset& data, const PenaltyMatrixSpec& penalty,
                            const PathOptions& options = {});

// Largest violation of the subgradient optimality conditions at `lambda` for
// a coefficient vector supported on `active_set`.
double kkt_residual(const Dataset& data, double lambda, std::span<const int> active_set,
                    const Eigen::VectorXd& beta);

// LASSO estimate at an arbitrary lambda read off a computed path: the
// segment (lambda_{k+1}, lambda_k] containing it fixes the active set and
// signs. Above lambda_1 the estimate is zero (empty active set).
PathStep lasso_solution_at(const SolutionPath& path, const Dataset& data, double lambda);

// Identity, or the tridiagonal J with diagonal (1, 2, ..., 2, 1) and -1 on
// the first off-diagonals.
Eigen::MatrixXd penalty_matrix(PenaltyKind kind, Eigen::Index dim);
// Some R with R'R = penalty_matrix(kind, dim).
Eigen::MatrixXd penalty_root(PenaltyKind kind, Eigen::Index dim);

// Ratio of extreme eigenvalues of a symmetric positive semidefinite matrix;
// +inf when the smallest is not positive.
double condition_number(const Eigen::MatrixXd& gram);

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& X, std::span<const int> columns);

// Residual sum of squares of `beta` supported on `active_set`.
double residual_sum_of_squares(const Dataset& data, std::span<const int> active_set,
                               const Eigen::VectorXd& beta);

}  // namespace scp
