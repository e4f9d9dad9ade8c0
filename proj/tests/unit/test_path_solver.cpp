#include <doctest.h>

#include <algorithm>
#include <random>

#include "error.hpp"
#include "oracles.hpp"
#include "path_solver.hpp"

using namespace scp;

namespace {

Dataset random_dataset(int rows, int cols, std::mt19937_64& rng) {
  Eigen::MatrixXd X = oracle::gaussian_matrix(rows, cols, rng);
  Eigen::VectorXd beta = oracle::gaussian_vector(cols, rng);
  Eigen::VectorXd y = X * beta + 0.5 * oracle::gaussian_vector(rows, rng);
  return make_dataset(std::move(X), std::move(y));
}

Eigen::VectorXd expand(const PathStep& step, Eigen::Index p) {
  Eigen::VectorXd full = Eigen::VectorXd::Zero(p);
  for (std::size_t k = 0; k < step.active_set.size(); ++k) full(step.active_set[k]) = step.beta(static_cast<Eigen::Index>(k));
  return full;
}

std::size_t symmetric_difference(std::vector<int> a, std::vector<int> b) {
  std::vector<int> out;
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out.size();
}

}  // namespace

TEST_CASE("lasso_closed_form") {
  SUBCASE("identity design subtracts half lambda times the signs") {
    const Eigen::VectorXd beta = lasso_closed_form(Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2d(4, -2), 2.0,
                                                   Eigen::Vector2d(1, -1));
    CHECK(beta(0) == doctest::Approx(3.0));
    CHECK(beta(1) == doctest::Approx(-1.0));
  }
  SUBCASE("lambda zero is least squares") {
    std::mt19937_64 rng(3);
    const Eigen::MatrixXd X = oracle::gaussian_matrix(10, 3, rng);
    const Eigen::VectorXd y = oracle::gaussian_vector(10, rng);
    const Eigen::VectorXd ols = X.colPivHouseholderQr().solve(y);
    const Eigen::VectorXd beta = lasso_closed_form(X, y, 0.0, Eigen::Vector3d(1, 1, -1));
    CHECK((beta - ols).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("collinear columns raise SingularGram") {
    Eigen::MatrixXd X(3, 2);
    X << 1, 2, 2, 4, 3, 6;
    try {
      lasso_closed_form(X, Eigen::Vector3d(1, 2, 3), 0.5, Eigen::Vector2d(1, 1));
      FAIL("expected SingularGram");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::SingularGram);
    }
  }
}

TEST_CASE("lars_lasso_path on the one-variable toy") {
  Dataset data = make_dataset(Eigen::Vector3d(1, 2, 3), Eigen::Vector3d(2, 4, 6));
  const SolutionPath path = lars_lasso_path(data);
  REQUIRE(path.steps.size() == 1);
  CHECK(path.steps[0].lambda == doctest::Approx(56.0));
  CHECK(path.steps[0].active_set == std::vector<int>{0});
  CHECK(path.steps[0].signs == std::vector<int>{1});
  CHECK(path.terminal_lambda == 0.0);
  // least-squares end of the path
  const PathStep end = lasso_solution_at(path, data, 0.0);
  CHECK(end.beta(0) == doctest::Approx(2.0));
}

TEST_CASE("lars_lasso_path degenerate responses") {
  SUBCASE("zero response gives an empty path") {
    const Dataset data = make_dataset(Eigen::Matrix<double, 3, 2>::Ones(), Eigen::Vector3d::Zero());
    CHECK(lars_lasso_path(data).steps.empty());
  }
  SUBCASE("response orthogonal to every column") {
    Eigen::MatrixXd X(3, 1);
    X << 1, 1, 0;
    const Dataset data = make_dataset(X, Eigen::Vector3d(1, -1, 0));
    try {
      lars_lasso_path(data);
      FAIL("expected DegenerateDesign");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::DegenerateDesign);
    }
  }
}

TEST_CASE("lars_lasso_path structural invariants and coordinate-descent agreement") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> pick_p(1, 8);
  for (int trial = 0; trial < 40; ++trial) {
    const int p = pick_p(rng);
    const int rows = std::uniform_int_distribution<int>(2, 20)(rng);
    const Dataset data = random_dataset(rows, p, rng);
    const SolutionPath path = lars_lasso_path(data);
    REQUIRE(!path.steps.empty());
    const auto cap = static_cast<std::size_t>(std::min(rows, p));
    for (std::size_t k = 0; k < path.steps.size(); ++k) {
      const PathStep& step = path.steps[k];
      CHECK(step.active_set.size() <= cap);
      CHECK(std::is_sorted(step.active_set.begin(), step.active_set.end()));
      CHECK(std::adjacent_find(step.active_set.begin(), step.active_set.end()) == step.active_set.end());
      CHECK(step.signs.size() == step.active_set.size());
      CHECK(static_cast<std::size_t>(step.beta.size()) == step.active_set.size());
      for (std::size_t a = 0; a < step.signs.size(); ++a) {
        const double b = step.beta(static_cast<Eigen::Index>(a));
        if (std::abs(b) > 1e-10) CHECK((b > 0) == (step.signs[a] > 0));
      }
      const double scale = std::max(1.0, step.lambda);
      CHECK(kkt_residual(data, step.lambda, step.active_set, step.beta) <= 1e-8 * scale);
      const Eigen::VectorXd cd = oracle::coordinate_descent_lasso(data.X, data.y, step.lambda);
      CHECK((expand(step, p) - cd).cwiseAbs().maxCoeff() <= 1e-6);
      const Eigen::VectorXd closed =
          lasso_closed_form(select_columns(data.X, step.active_set), data.y, step.lambda, step.sign_vector());
      CHECK((closed - step.beta).cwiseAbs().maxCoeff() <= 1e-8 * std::max(1.0, closed.cwiseAbs().maxCoeff()));
      if (k > 0) {
        CHECK(step.lambda < path.steps[k - 1].lambda);
        CHECK(symmetric_difference(step.active_set, path.steps[k - 1].active_set) == 1);
      }
    }
    CHECK(path.terminal_lambda < path.steps.back().lambda);
  }
}

TEST_CASE("residual sum of squares grows with lambda inside a segment") {
  std::mt19937_64 rng(99);
  const Dataset data = random_dataset(15, 6, rng);
  const SolutionPath path = lars_lasso_path(data);
  for (std::size_t k = 0; k + 1 < path.steps.size(); ++k) {
    const double hi = path.steps[k].lambda, lo = path.steps[k + 1].lambda;
    const PathStep inner = lasso_solution_at(path, data, 0.5 * (hi + lo));
    const PathStep knot = lasso_solution_at(path, data, lo);
    CHECK(residual_sum_of_squares(data, inner.active_set, inner.beta) >
          residual_sum_of_squares(data, knot.active_set, knot.beta));
  }
}

TEST_CASE("perfectly collinear columns are skipped") {
  std::mt19937_64 rng(5);
  Eigen::MatrixXd X = oracle::gaussian_matrix(30, 4, rng);
  X.col(1) = X.col(0);
  const Eigen::VectorXd y = X.col(0) * 3.0 + X.col(2) + 0.1 * oracle::gaussian_vector(30, rng);
  const Dataset data = make_dataset(X, y);
  const SolutionPath path = lars_lasso_path(data);
  for (const PathStep& step : path.steps) {
    const bool both = std::find(step.active_set.begin(), step.active_set.end(), 0) != step.active_set.end() &&
                      std::find(step.active_set.begin(), step.active_set.end(), 1) != step.active_set.end();
    CHECK_FALSE(both);
    CHECK(kkt_residual(data, step.lambda, step.active_set, step.beta) <= 1e-8 * std::max(1.0, step.lambda));
  }
  // ties on entry go to the lower index
  CHECK(path.steps.front().active_set == std::vector<int>{0});
}

TEST_CASE("kkt_residual") {
  std::mt19937_64 rng(17);
  const Dataset data = random_dataset(12, 4, rng);
  const double lambda_max = 2.0 * (data.X.transpose() * data.y).cwiseAbs().maxCoeff();
  CHECK(kkt_residual(data, lambda_max, {}, Eigen::VectorXd()) <= 1e-8);
  CHECK(kkt_residual(data, 1.5 * lambda_max, {}, Eigen::VectorXd()) <= 1e-8);
  CHECK(kkt_residual(data, 0.5 * lambda_max, {}, Eigen::VectorXd()) > 0.0);

  const SolutionPath path = lars_lasso_path(data);
  const PathStep& step = path.steps.back();
  Eigen::VectorXd perturbed = step.beta;
  perturbed(0) += 0.1;
  CHECK(kkt_residual(data, step.lambda, step.active_set, perturbed) > 1e-3);
}

TEST_CASE("penalty matrices") {
  const Eigen::MatrixXd J2 = penalty_matrix(PenaltyKind::FusedDifference, 2);
  CHECK(J2(0, 0) == 1.0);
  CHECK(J2(0, 1) == -1.0);
  CHECK(J2(1, 0) == -1.0);
  CHECK(J2(1, 1) == 1.0);
  for (Eigen::Index dim : {1, 2, 3, 6}) {
    for (PenaltyKind kind : {PenaltyKind::Identity, PenaltyKind::FusedDifference}) {
      const Eigen::MatrixXd R = penalty_root(kind, dim);
      CHECK((R.transpose() * R - penalty_matrix(kind, dim)).cwiseAbs().maxCoeff() < 1e-14);
    }
  }
  const Eigen::MatrixXd J4 = penalty_matrix(PenaltyKind::FusedDifference, 4);
  CHECK(J4(1, 1) == 2.0);
  CHECK(J4(0, 2) == 0.0);
}

TEST_CASE("penalized_path") {
  std::mt19937_64 rng(41);
  const Dataset data = random_dataset(10, 5, rng);

  SUBCASE("zero weight is the LASSO path") {
    const SolutionPath a = lars_lasso_path(data);
    for (PenaltyKind kind : {PenaltyKind::Identity, PenaltyKind::FusedDifference}) {
      const SolutionPath b = penalized_path(data, {kind, 0.0});
      REQUIRE(a.steps.size() == b.steps.size());
      for (std::size_t k = 0; k < a.steps.size(); ++k) {
        CHECK(a.steps[k].lambda == b.steps[k].lambda);
        CHECK(a.steps[k].active_set == b.steps[k].active_set);
      }
    }
  }
  SUBCASE("negative weight is rejected") {
    try {
      penalized_path(data, {PenaltyKind::Identity, -1.0});
      FAIL("expected InvalidPenalty");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InvalidPenalty);
    }
  }
  SUBCASE("one-variable elastic net matches a grid minimization") {
    const Dataset toy = make_dataset(Eigen::Vector2d(1, 1), Eigen::Vector2d(1, 1));
    const SolutionPath path = penalized_path(toy, {PenaltyKind::Identity, 1.0});
    REQUIRE(path.steps.size() == 1);
    CHECK(path.steps[0].lambda == doctest::Approx(4.0));
    for (double lambda : {0.5, 1.0, 2.0, 3.0}) {
      // objective (1-b)^2 * 2 + b^2 + lambda |b|
      double best_b = 0.0, best = 1e300;
      for (int i = 0; i <= 2000000; ++i) {
        const double b = -1.0 + 3.0 * i / 2000000.0;
        const double f = 2.0 * (1.0 - b) * (1.0 - b) + b * b + lambda * std::abs(b);
        if (f < best) best = f, best_b = b;
      }
      Dataset augmented = make_dataset(Eigen::Vector3d(1, 1, 1), Eigen::Vector3d(1, 1, 0));
      const PathStep at = lasso_solution_at(path, augmented, lambda);
      REQUIRE(at.beta.size() == 1);
      CHECK(at.beta(0) == doctest::Approx(best_b).epsilon(1e-5));
      CHECK(at.beta(0) == doctest::Approx((4.0 - lambda) / 6.0));
    }
  }
  SUBCASE("elastic net and smooth lasso knots match coordinate descent") {
    for (PenaltyKind kind : {PenaltyKind::Identity, PenaltyKind::FusedDifference}) {
      const double mu = 0.7;
      const SolutionPath path = penalized_path(data, {kind, mu});
      REQUIRE(!path.steps.empty());
      // independent square root: identity, or first differences
      Eigen::MatrixXd root = Eigen::MatrixXd::Identity(5, 5);
      if (kind == PenaltyKind::FusedDifference) {
        root = Eigen::MatrixXd::Zero(4, 5);
        for (int i = 0; i < 4; ++i) root(i, i) = 1.0, root(i, i + 1) = -1.0;
      }
      Eigen::MatrixXd Xa(data.rows() + root.rows(), 5);
      Xa << data.X, std::sqrt(mu) * root;
      Eigen::VectorXd ya = Eigen::VectorXd::Zero(Xa.rows());
      ya.head(data.rows()) = data.y;
      for (const PathStep& step : path.steps) {
        const Eigen::VectorXd cd = oracle::coordinate_descent_lasso(Xa, ya, step.lambda);
        CHECK((expand(step, 5) - cd).cwiseAbs().maxCoeff() <= 1e-6);
      }
    }
  }
}

TEST_CASE("lasso_solution_at interpolates between knots") {
  std::mt19937_64 rng(77);
  const Dataset data = random_dataset(14, 5, rng);
  const SolutionPath path = lars_lasso_path(data);
  for (std::size_t k = 0; k + 1 < path.steps.size(); ++k) {
    const double lambda = 0.3 * path.steps[k].lambda + 0.7 * path.steps[k + 1].lambda;
    const PathStep at = lasso_solution_at(path, data, lambda);
    const Eigen::VectorXd cd = oracle::coordinate_descent_lasso(data.X, data.y, lambda);
    CHECK((expand(at, 5) - cd).cwiseAbs().maxCoeff() <= 1e-6);
  }
  CHECK(lasso_solution_at(path, data, 2.0 * path.steps.front().lambda).active_set.empty());
}
