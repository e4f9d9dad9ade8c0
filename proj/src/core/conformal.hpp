#pragma once

#include <Eigen/Dense>

#include "dataset.hpp"
#include "interval_set.hpp"

namespace scp {

// Training rows followed by the query row x_new, whose label is the free
// candidate value y.
struct AugmentedProblem {
  Eigen::MatrixXd X_tilde;  // n x p, query last
  Eigen::VectorXd y_known;  // n - 1

  Eigen::Index size() const { return X_tilde.rows(); }
};

AugmentedProblem make_augmented(const Dataset& data, const Eigen::VectorXd& x_new);

// Fitted values of a linear smoother, mu = hat * y~ + offset, where neither
// part depends on the candidate label. The hat matrix is kept either dense or
// as basis * core * basis' so that n x n matrices are never formed on the
// prediction path.
class ScoreModel {
 public:
  static ScoreModel dense(Eigen::MatrixXd hat, Eigen::VectorXd offset);
  static ScoreModel factored(Eigen::MatrixXd basis, Eigen::MatrixXd core, Eigen::VectorXd offset);

  Eigen::Index size() const { return offset_.size(); }
  const Eigen::VectorXd& offset() const { return offset_; }

  // (I - hat) v
  Eigen::VectorXd residual_operator(const Eigen::VectorXd& v) const;
  Eigen::MatrixXd hat() const;

 private:
  ScoreModel() = default;

  bool is_dense_ = true;
  Eigen::MatrixXd hat_;    // dense form
  Eigen::MatrixXd basis_;  // factored form
  Eigen::MatrixXd core_;
  Eigen::VectorXd offset_;
};

// Nonconformity of pair i at candidate label y is |a_i + b_i y|; the query is
// the last entry.
struct AffineScore {
  Eigen::VectorXd a;
  Eigen::VectorXd b;

  Eigen::Index size() const { return a.size(); }
  double score(Eigen::Index i, double y) const { return std::abs(a(i) + b(i) * y); }
};

// Negates every (a_i, b_i) with b_i < 0. Scores are unchanged.
AffineScore harmonize(AffineScore scores);

// a = (I - hat)(y_1..y_{n-1}, 0)' - offset, b = (I - hat)(0..0, 1)', harmonized.
AffineScore affine_scores(const AugmentedProblem& problem, const ScoreModel& model);

// {y : |a_i + b_i y| >= |a_n + b_n y|} for harmonized scores, i 0-based.
IntervalSet score_interval(Eigen::Index i, const AffineScore& scores);

// {y : #{i : y in S_i} >= n * epsilon}, exact.
IntervalSet conformal_set(const AffineScore& scores, double epsilon);

// #{i : alpha_i(y) >= alpha_n(y)}, evaluated directly.
Eigen::Index conformity_count(double y, const AffineScore& scores);
double p_value(double y, const AffineScore& scores);

}  // namespace scp
