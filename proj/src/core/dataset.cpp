#include "dataset.hpp"

#include <cmath>
#include <string>

#include "error.hpp"

namespace scp {

void validate(const Dataset& data) {
  constexpr const char* stage = "dataset";
  if (data.X.rows() != data.y.size()) {
    throw Error(ErrorKind::DimensionMismatch, stage,
                "design has " + std::to_string(data.X.rows()) + " rows but response has " +
                    std::to_string(data.y.size()) + " entries");
  }
  if (data.X.rows() < 2) {
    throw Error(ErrorKind::DimensionMismatch, stage, "at least two labeled rows are required");
  }
  if (data.X.cols() < 1) {
    throw Error(ErrorKind::DimensionMismatch, stage, "at least one covariate is required");
  }
  if (!data.X.allFinite() || !data.y.allFinite()) {
    throw Error(ErrorKind::InvalidArgument, stage, "non-finite entry in design or response");
  }
}

Dataset make_dataset(Eigen::MatrixXd X, Eigen::VectorXd y) {
  Dataset data{std::move(X), std::move(y)};
  validate(data);
  return data;
}

Standardization Standardization::fit(const Dataset& data) {
  Standardization s;
  const double n = static_cast<double>(data.rows());
  s.column_mean = data.X.colwise().mean().transpose();
  s.column_scale.resize(data.cols());
  for (Eigen::Index j = 0; j < data.cols(); ++j) {
    const double ss = (data.X.col(j).array() - s.column_mean(j)).square().sum();
    const double sd = std::sqrt(ss / (n - 1.0));
    // constant columns are left unscaled
    s.column_scale(j) = sd > 1e-12 ? sd : 1.0;
  }
  s.response_mean = data.y.mean();
  return s;
}

Dataset Standardization::apply(const Dataset& data) const {
  Dataset out;
  out.X = (data.X.rowwise() - column_mean.transpose()).array().rowwise() /
          column_scale.transpose().array();
  out.y = data.y.array() - response_mean;
  return out;
}

Eigen::VectorXd Standardization::apply_row(const Eigen::VectorXd& x) const {
  return ((x - column_mean).array() / column_scale.array()).matrix();
}

}  // namespace scp
