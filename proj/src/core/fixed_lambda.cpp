#include "fixed_lambda.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "conformal.hpp"
#include "error.hpp"
#include "path_solver.hpp"

namespace scp {

namespace {

constexpr const char* kStage = "fixed_lambda_conformal_set";

struct ActiveState {
  std::vector<int> active;  // sorted
  std::vector<int> signs;
};

// On a fixed active set the refit is beta(y) = beta0 + y g and the residual
// vector is a + y b.
struct Linearization {
  Eigen::VectorXd beta0, g, a, b;
};

Linearization linearize(const Eigen::MatrixXd& Xt, const Eigen::VectorXd& padded, const ActiveState& state,
                        double half_lambda) {
  const Eigen::Index n = Xt.rows();
  Eigen::VectorXd query = Eigen::VectorXd::Zero(n);
  query(n - 1) = 1.0;
  Linearization lin;
  if (state.active.empty()) {
    lin.a = padded;
    lin.b = query;
    return lin;
  }
  const Eigen::MatrixXd XA = select_columns(Xt, state.active);
  const Eigen::LLT<Eigen::MatrixXd> llt(XA.transpose() * XA);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::SingularGram, kStage, "active Gram matrix of the refit is singular");
  }
  Eigen::VectorXd s(static_cast<Eigen::Index>(state.signs.size()));
  for (std::size_t i = 0; i < state.signs.size(); ++i) s(static_cast<Eigen::Index>(i)) = state.signs[i];
  lin.beta0 = llt.solve(XA.transpose() * padded - half_lambda * s);
  lin.g = llt.solve(XA.row(n - 1).transpose());
  lin.a = padded - XA * lin.beta0;
  lin.b = query - XA * lin.g;
  return lin;
}

struct Piece {
  double lo, hi;
  AffineScore scores;
};

void trace(const Eigen::MatrixXd& Xt, const Eigen::VectorXd& padded, double half_lambda, double y_start,
           ActiveState state, int direction, std::vector<Piece>& pieces) {
  const int p = static_cast<int>(Xt.cols());
  const int max_pieces = 20 * (p + static_cast<int>(Xt.rows())) + 100;
  double y = y_start;
  int just_changed = -1;
  for (int iteration = 0; iteration < max_pieces; ++iteration) {
    const Linearization lin = linearize(Xt, padded, state, half_lambda);
    const double slack = 1e-12 * (1.0 + std::abs(y));
    const double changed_slack = 1e-9 * (1.0 + std::abs(y));

    double best_t = kInfinity;
    int best_col = -1;
    int best_sign = 0;
    bool best_add = false;
    auto consider = [&](double t, int col, bool add, int sign) {
      const double floor = col == just_changed ? changed_slack : slack;
      if (!std::isfinite(t) || t <= floor) return;
      if (t < best_t || (t == best_t && col < best_col)) {
        best_t = t;
        best_col = col;
        best_add = add;
        best_sign = sign;
      }
    };

    for (std::size_t e = 0; e < state.active.size(); ++e) {
      const auto ei = static_cast<Eigen::Index>(e);
      if (lin.g(ei) == 0.0) continue;
      consider(direction * (-lin.beta0(ei) / lin.g(ei) - y), state.active[e], false, 0);
    }
    const Eigen::VectorXd cu = Xt.transpose() * lin.a;
    const Eigen::VectorXd cv = Xt.transpose() * lin.b;
    for (int j = 0; j < p; ++j) {
      if (std::binary_search(state.active.begin(), state.active.end(), j)) continue;
      if (cv(j) == 0.0) continue;
      consider(direction * ((half_lambda - cu(j)) / cv(j) - y), j, true, 1);
      consider(direction * ((-half_lambda - cu(j)) / cv(j) - y), j, true, -1);
    }

    AffineScore scores{lin.a, lin.b};
    if (best_col < 0) {
      pieces.push_back(direction > 0 ? Piece{y, kInfinity, std::move(scores)}
                                     : Piece{-kInfinity, y, std::move(scores)});
      return;
    }
    const double y_next = y + direction * best_t;
    pieces.push_back(Piece{std::min(y, y_next), std::max(y, y_next), std::move(scores)});

    if (best_add) {
      const auto pos = std::upper_bound(state.active.begin(), state.active.end(), best_col) - state.active.begin();
      state.active.insert(state.active.begin() + pos, best_col);
      state.signs.insert(state.signs.begin() + pos, best_sign);
    } else {
      const auto pos = std::find(state.active.begin(), state.active.end(), best_col) - state.active.begin();
      state.active.erase(state.active.begin() + pos);
      state.signs.erase(state.signs.begin() + pos);
    }
    just_changed = best_col;
    y = y_next;
  }
  throw Error(ErrorKind::DegenerateDesign, kStage, "label homotopy did not terminate");
}

}  // namespace

FixedLambdaResult fixed_lambda_conformal_set(const Dataset& data, const Eigen::VectorXd& x_new,
                                             double lambda, double epsilon) {
  validate(data);
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorKind::InvalidArgument, kStage, "lambda must be positive and finite");
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, kStage, "epsilon must lie in (0, 1)");
  }
  const AugmentedProblem problem = make_augmented(data, x_new);
  const Eigen::Index n = problem.size();
  Eigen::VectorXd padded = Eigen::VectorXd::Zero(n);
  padded.head(n - 1) = data.y;

  // start the sweep at the training-data prediction
  const PathStep train = lasso_solution_at(lars_lasso_path(data), data, lambda);
  double y_start = 0.0;
  for (std::size_t k = 0; k < train.active_set.size(); ++k) {
    y_start += x_new(train.active_set[k]) * train.beta(static_cast<Eigen::Index>(k));
  }

  Dataset augmented{problem.X_tilde, padded};
  augmented.y(n - 1) = y_start;
  const PathStep start = lasso_solution_at(lars_lasso_path(augmented), augmented, lambda);
  ActiveState state;
  for (std::size_t k = 0; k < start.active_set.size(); ++k) {
    // a coefficient sitting exactly on a knot carries no sign information yet
    if (std::abs(start.beta(static_cast<Eigen::Index>(k))) > 0.0) {
      state.active.push_back(start.active_set[k]);
      state.signs.push_back(start.signs[k]);
    }
  }

  const double half_lambda = 0.5 * lambda;
  std::vector<Piece> pieces;
  trace(problem.X_tilde, padded, half_lambda, y_start, state, +1, pieces);
  trace(problem.X_tilde, padded, half_lambda, y_start, state, -1, pieces);

  FixedLambdaResult result;
  result.segments = pieces.size();
  for (const Piece& piece : pieces) {
    const IntervalSet local = conformal_set(harmonize(piece.scores), epsilon);
    result.set = result.set.unite(local.intersect(IntervalSet{{piece.lo, piece.hi}}));
  }
  return result;
}

}  // namespace scp
