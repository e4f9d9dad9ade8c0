#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "dataset.hpp"
#include "interval_set.hpp"

namespace scp {

struct FixedLambdaResult {
  IntervalSet set;
  std::size_t segments = 0;  // pieces of the label homotopy
};

// Conformal set of the LASSO refit on the augmented sample (x_i, y_i), (x_new, y)
// for a lambda chosen independently of the data. The refit is tracked exactly
// as y sweeps the real line: on each piece the active set is constant and the
// scores are affine in y, so each piece contributes an exact conformal set.
// The pairs are treated symmetrically, which makes the set exchangeable-valid.
FixedLambdaResult fixed_lambda_conformal_set(const Dataset& data, const Eigen::VectorXd& x_new,
                                             double lambda, double epsilon);

}  // namespace scp
