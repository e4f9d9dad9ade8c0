#pragma once

#include <Eigen/Dense>

namespace scp {

// Labeled training observations: one row of `X` per entry of `y`.
struct Dataset {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;

  Eigen::Index rows() const { return X.rows(); }
  Eigen::Index cols() const { return X.cols(); }
};

// Validates shape (at least two rows, at least one column, matching lengths)
// and finiteness. Throws scp::Error(DimensionMismatch / InvalidArgument).
Dataset make_dataset(Eigen::MatrixXd X, Eigen::VectorXd y);
void validate(const Dataset& data);

// Column centering/scaling fitted on the training rows only. The response is
// centered so that an intercept-free model is reasonable.
struct Standardization {
  Eigen::VectorXd column_mean;
  Eigen::VectorXd column_scale;
  double response_mean = 0.0;

  static Standardization fit(const Dataset& data);

  Dataset apply(const Dataset& data) const;
  Eigen::VectorXd apply_row(const Eigen::VectorXd& x) const;
};

}  // namespace scp
