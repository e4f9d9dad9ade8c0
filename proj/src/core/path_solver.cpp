#include "path_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "error.hpp"

namespace scp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Event {
  double gamma = -1.0;  // half-lambda at which the event fires
  int column = -1;
  bool add = false;
  int sign = 0;  // sign of the entering variable
};

// Keeps the best event: the largest gamma, ties (within tol) to the lowest column.
void consider(Event& best, const Event& candidate, double tol) {
  if (best.column < 0) {
    best = candidate;
    return;
  }
  const double scale = std::max(std::abs(best.gamma), std::abs(candidate.gamma));
  if (std::abs(candidate.gamma - best.gamma) <= tol * scale) {
    if (candidate.column < best.column) best = candidate;
  } else if (candidate.gamma > best.gamma) {
    best = candidate;
  }
}

bool contains(const std::vector<int>& v, int x) { return std::find(v.begin(), v.end(), x) != v.end(); }

// Latest drop event on the current segment, i.e. an active coefficient that
// reaches zero while moving against its sign.
void find_drops(const std::vector<int>& active, const std::vector<int>& signs,
                const Eigen::VectorXd& beta_ols, const Eigen::VectorXd& w, double gamma,
                const std::vector<int>& frozen, double tol, Event& best) {
  for (std::size_t a = 0; a < active.size(); ++a) {
    if (contains(frozen, active[a])) continue;
    if (!(signs[a] * w(a) < 0.0)) continue;
    const double root = beta_ols(a) / w(a);
    if (!std::isfinite(root) || root <= 0.0 || root > gamma * (1.0 + tol)) continue;
    consider(best, Event{root, active[a], false, 0}, tol);
  }
}

}  // namespace

Eigen::VectorXd PathStep::sign_vector() const {
  Eigen::VectorXd s(static_cast<Eigen::Index>(signs.size()));
  for (std::size_t i = 0; i < signs.size(); ++i) s(static_cast<Eigen::Index>(i)) = signs[i];
  return s;
}

double condition_number(const Eigen::MatrixXd& gram) {
  if (gram.size() == 0) return 1.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) return kInf;
  return hi / lo;
}

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& X, std::span<const int> columns) {
  Eigen::MatrixXd out(X.rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t k = 0; k < columns.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = X.col(columns[k]);
  return out;
}

Eigen::VectorXd lasso_closed_form(const Eigen::MatrixXd& X_active, const Eigen::VectorXd& y,
                                  double lambda, const Eigen::VectorXd& signs,
                                  double condition_limit) {
  constexpr const char* stage = "lasso_closed_form";
  if (X_active.rows() != y.size() || X_active.cols() != signs.size()) {
    throw Error(ErrorKind::DimensionMismatch, stage, "active design, response and sign vector disagree");
  }
  if (!(lambda >= 0.0)) throw Error(ErrorKind::InvalidArgument, stage, "lambda must be nonnegative");
  const Eigen::MatrixXd gram = X_active.transpose() * X_active;
  const double cond = condition_number(gram);
  if (!(cond <= condition_limit)) {
    throw Error(ErrorKind::SingularGram, stage,
                "Gram matrix of the active set is singular (condition number " + std::to_string(cond) + ")");
  }
  const Eigen::VectorXd rhs = X_active.transpose() * y - 0.5 * lambda * signs;
  return gram.llt().solve(rhs);
}

SolutionPath lars_lasso_path(const Dataset& data, const PathOptions& options) {
  constexpr const char* stage = "lars_lasso_path";
  validate(data);
  const Eigen::MatrixXd& X = data.X;
  const Eigen::VectorXd& y = data.y;
  const int p = static_cast<int>(X.cols());
  const int cap = static_cast<int>(std::min<Eigen::Index>(X.rows(), X.cols()));
  const double tol = options.knot_tolerance;

  SolutionPath path;
  if (y.isZero(0.0)) return path;

  const Eigen::VectorXd c = X.transpose() * y;
  const double cmax = c.cwiseAbs().maxCoeff();
  const double scale = X.colwise().norm().maxCoeff() * y.norm();
  if (!(cmax > 1e-13 * scale)) {
    throw Error(ErrorKind::DegenerateDesign, stage, "response is orthogonal to every column");
  }

  int first = 0;
  while (std::abs(c(first)) < cmax * (1.0 - tol)) ++first;

  double gamma = cmax;
  std::vector<int> active{first};
  std::vector<int> signs{c(first) > 0 ? 1 : -1};
  std::vector<char> excluded(static_cast<std::size_t>(p), 0);
  std::vector<int> frozen{first};  // variables already changed at the current knot
  bool overwrite = false;

  const int max_iterations = 50 * (p + static_cast<int>(X.rows())) + 100;
  for (int iteration = 0;; ++iteration) {
    const Eigen::MatrixXd XA = select_columns(X, active);
    const Eigen::MatrixXd gram = XA.transpose() * XA;
    const Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success) {
      throw Error(ErrorKind::SingularGram, stage, "active Gram matrix lost positive definiteness");
    }
    const Eigen::VectorXd s = [&] {
      Eigen::VectorXd v(static_cast<Eigen::Index>(signs.size()));
      for (std::size_t i = 0; i < signs.size(); ++i) v(static_cast<Eigen::Index>(i)) = signs[i];
      return v;
    }();
    const Eigen::VectorXd beta_ols = llt.solve(XA.transpose() * y);
    const Eigen::VectorXd w = llt.solve(s);

    PathStep step{2.0 * gamma, active, signs, beta_ols - gamma * w};
    if (overwrite) {
      path.steps.back() = std::move(step);
    } else {
      path.steps.push_back(std::move(step));
    }

    Event best;
    find_drops(active, signs, beta_ols, w, gamma, frozen, tol, best);

    if (static_cast<int>(active.size()) >= cap) {
      path.terminal_lambda = best.column >= 0 ? 2.0 * best.gamma : 0.0;
      break;
    }
    if (iteration >= max_iterations) {
      path.terminal_lambda = 2.0 * gamma;
      break;
    }

    const Eigen::VectorXd r0 = y - XA * beta_ols;
    const Eigen::VectorXd q = XA * w;
    const Eigen::VectorXd c0 = X.transpose() * r0;
    const Eigen::VectorXd d = X.transpose() * q;
    for (int j = 0; j < p; ++j) {
      if (excluded[static_cast<std::size_t>(j)] || contains(active, j) || contains(frozen, j)) continue;
      // c_j(g) = c0_j + g d_j meets +g or -g; only crossings from inside count
      if (1.0 - d(j) > 0.0) {
        const double root = c0(j) / (1.0 - d(j));
        if (std::isfinite(root) && root > 0.0 && root <= gamma * (1.0 + tol)) {
          consider(best, Event{root, j, true, 1}, tol);
        }
      }
      if (1.0 + d(j) > 0.0) {
        const double root = -c0(j) / (1.0 + d(j));
        if (std::isfinite(root) && root > 0.0 && root <= gamma * (1.0 + tol)) {
          consider(best, Event{root, j, true, -1}, tol);
        }
      }
    }

    if (best.column < 0) {
      path.terminal_lambda = 0.0;
      break;
    }

    if (best.add) {
      std::vector<int> trial = active;
      trial.insert(std::upper_bound(trial.begin(), trial.end(), best.column), best.column);
      const Eigen::MatrixXd XT = select_columns(X, trial);
      if (!(condition_number(XT.transpose() * XT) <= options.condition_limit)) {
        excluded[static_cast<std::size_t>(best.column)] = 1;
        overwrite = true;
        continue;
      }
      const auto pos = std::upper_bound(active.begin(), active.end(), best.column) - active.begin();
      active.insert(active.begin() + pos, best.column);
      signs.insert(signs.begin() + pos, best.sign);
    } else {
      const auto pos = std::find(active.begin(), active.end(), best.column) - active.begin();
      active.erase(active.begin() + pos);
      signs.erase(signs.begin() + pos);
      if (active.empty()) {
        // cannot happen on a LASSO path (the first variable never leaves at a
        // positive lambda), but guard against a degenerate numeric state
        path.terminal_lambda = 2.0 * best.gamma;
        break;
      }
    }

    const bool merged = best.gamma >= gamma * (1.0 - tol);
    if (merged) {
      frozen.push_back(best.column);
    } else {
      frozen.assign(1, best.column);
      gamma = best.gamma;
    }
    overwrite = merged;
  }
  return path;
}

Eigen::MatrixXd penalty_matrix(PenaltyKind kind, Eigen::Index dim) {
  if (kind == PenaltyKind::Identity) return Eigen::MatrixXd::Identity(dim, dim);
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    J(i, i) = (i == 0 || i == dim - 1) ? 1.0 : 2.0;
    if (i + 1 < dim) {
      J(i, i + 1) = -1.0;
      J(i + 1, i) = -1.0;
    }
  }
  return J;
}

Eigen::MatrixXd penalty_root(PenaltyKind kind, Eigen::Index dim) {
  // J is the identity for a single variable
  if (kind == PenaltyKind::Identity || dim == 1) return Eigen::MatrixXd::Identity(dim, dim);
  // first-difference operator D, (dim-1) x dim, with D'D = J
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(std::max<Eigen::Index>(dim - 1, 0), dim);
  for (Eigen::Index i = 0; i + 1 < dim; ++i) {
    D(i, i) = -1.0;
    D(i, i + 1) = 1.0;
  }
  return D;
}

SolutionPath penalized_path(const Dataset& data, const PenaltyMatrixSpec& penalty,
                            const PathOptions& options) {
  constexpr const char* stage = "penalized_path";
  if (!(penalty.weight >= 0.0) || !std::isfinite(penalty.weight)) {
    throw Error(ErrorKind::InvalidPenalty, stage, "penalty weight must be a finite nonnegative number");
  }
  validate(data);
  if (penalty.weight == 0.0) return lars_lasso_path(data, options);

  const Eigen::MatrixXd root = std::sqrt(penalty.weight) * penalty_root(penalty.kind, data.cols());
  Dataset augmented;
  augmented.X.resize(data.rows() + root.rows(), data.cols());
  augmented.X << data.X, root;
  augmented.y = Eigen::VectorXd::Zero(augmented.X.rows());
  augmented.y.head(data.rows()) = data.y;
  return lars_lasso_path(augmented, options);
}

double kkt_residual(const Dataset& data, double lambda, std::span<const int> active_set,
                    const Eigen::VectorXd& beta) {
  if (static_cast<Eigen::Index>(active_set.size()) != beta.size()) {
    throw Error(ErrorKind::DimensionMismatch, "kkt_residual", "beta does not match its active set");
  }
  Eigen::VectorXd full = Eigen::VectorXd::Zero(data.cols());
  for (std::size_t k = 0; k < active_set.size(); ++k) full(active_set[k]) = beta(static_cast<Eigen::Index>(k));
  const Eigen::VectorXd gradient = data.X.transpose() * (data.y - data.X * full);
  const double half = 0.5 * lambda;
  // coefficients this small are on the kink of |.|, where any subgradient in
  // [-1, 1] is admissible
  const double zero_tol = 1e-12 * std::max(1.0, full.cwiseAbs().maxCoeff());
  double worst = 0.0;
  for (Eigen::Index j = 0; j < full.size(); ++j) {
    double violation;
    if (full(j) > zero_tol) {
      violation = std::abs(gradient(j) - half);
    } else if (full(j) < -zero_tol) {
      violation = std::abs(gradient(j) + half);
    } else {
      violation = std::max(0.0, std::abs(gradient(j)) - half);
    }
    worst = std::max(worst, violation);
  }
  return worst;
}

PathStep lasso_solution_at(const SolutionPath& path, const Dataset& data, double lambda) {
  constexpr const char* stage = "lasso_solution_at";
  if (!(lambda >= 0.0)) throw Error(ErrorKind::InvalidArgument, stage, "lambda must be nonnegative");
  if (path.steps.empty() || lambda >= path.steps.front().lambda) {
    return PathStep{lambda, {}, {}, Eigen::VectorXd()};
  }
  if (lambda < path.terminal_lambda) {
    throw Error(ErrorKind::InvalidArgument, stage, "lambda lies below the computed part of the path");
  }
  std::size_t k = 0;
  while (k + 1 < path.steps.size() && path.steps[k + 1].lambda >= lambda) ++k;
  const PathStep& segment = path.steps[k];
  PathStep out{lambda, segment.active_set, segment.signs, Eigen::VectorXd()};
  out.beta = lasso_closed_form(select_columns(data.X, segment.active_set), data.y, lambda,
                               segment.sign_vector(), kInf);
  return out;
}

double residual_sum_of_squares(const Dataset& data, std::span<const int> active_set,
                               const Eigen::VectorXd& beta) {
  const Eigen::VectorXd fitted = select_columns(data.X, active_set) * beta;
  return (data.y - fitted).squaredNorm();
}

}  // namespace scp
