#pragma once

// Independent reference computations shared by the unit and acceptance tests.
// None of these call into the library's solvers.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

// Cyclic coordinate descent on ||y - X b||^2 + lambda ||b||_1.
inline Eigen::VectorXd coordinate_descent_lasso(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                                                int max_sweeps = 200000, double tolerance = 1e-15) {
  const Eigen::Index p = X.cols();
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd r = y;
  const Eigen::VectorXd norms = X.colwise().squaredNorm().transpose();
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double biggest = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (norms(j) == 0.0) continue;
      const double rho = X.col(j).dot(r) + norms(j) * beta(j);
      const double half = 0.5 * lambda;
      const double next = rho > half ? (rho - half) / norms(j) : (rho < -half ? (rho + half) / norms(j) : 0.0);
      const double change = next - beta(j);
      if (change != 0.0) {
        r -= change * X.col(j);
        beta(j) = next;
        biggest = std::max(biggest, std::abs(change) * std::sqrt(norms(j)));
      }
    }
    if (biggest <= tolerance * std::max(1.0, y.norm())) break;
  }
  return beta;
}

// Minimizer of ||y - X b||^2 + lambda ||b||_1 + mu b'P b through the augmented
// least-squares form, solved by the same coordinate descent.
inline Eigen::VectorXd coordinate_descent_penalized(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                                                    double mu, const Eigen::MatrixXd& P) {
  const Eigen::LLT<Eigen::MatrixXd> llt(P);
  const Eigen::MatrixXd root = llt.matrixU();
  Eigen::MatrixXd Xa(X.rows() + root.rows(), X.cols());
  Xa << X, std::sqrt(mu) * root;
  Eigen::VectorXd ya = Eigen::VectorXd::Zero(Xa.rows());
  ya.head(y.size()) = y;
  return coordinate_descent_lasso(Xa, ya, lambda);
}

// Direct evaluation of #{i : |a_i + b_i y| >= |a_n + b_n y|} >= n eps.
inline bool in_conformal_set(double y, const Eigen::VectorXd& a, const Eigen::VectorXd& b, double epsilon) {
  const Eigen::Index n = a.size();
  const double query = std::abs(a(n - 1) + b(n - 1) * y);
  Eigen::Index count = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(a(i) + b(i) * y) >= query) ++count;
  }
  return static_cast<double>(count) >= static_cast<double>(n) * epsilon - 1e-9;
}

// Every y where some |a_i + b_i y| = |a_n + b_n y|.
inline std::vector<double> crossing_points(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::Index n = a.size();
  std::vector<double> points;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double db = b(i) - b(n - 1), sb = b(i) + b(n - 1);
    if (db != 0.0) points.push_back(-(a(i) - a(n - 1)) / db);
    if (sb != 0.0) points.push_back(-(a(i) + a(n - 1)) / sb);
  }
  std::sort(points.begin(), points.end());
  return points;
}

inline Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) M(i, j) = normal(rng);
  }
  return M;
}

inline Eigen::VectorXd gaussian_vector(Eigen::Index size, std::mt19937_64& rng) {
  return gaussian_matrix(size, 1, rng).col(0);
}

// Projection onto the column span of X (pseudo-inverse based).
inline Eigen::MatrixXd projection(const Eigen::MatrixXd& X) {
  if (X.cols() == 0) return Eigen::MatrixXd::Zero(X.rows(), X.rows());
  const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(X);
  return X * cod.pseudoInverse();
}

}  // namespace oracle
