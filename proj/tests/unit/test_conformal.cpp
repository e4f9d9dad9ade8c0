#include <doctest.h>

#include <random>

#include "conformal.hpp"
#include "oracles.hpp"
#include "path_solver.hpp"

using namespace scp;

namespace {

AffineScore random_scores(Eigen::Index n, std::mt19937_64& rng) {
  AffineScore s{oracle::gaussian_vector(n, rng), oracle::gaussian_vector(n, rng)};
  return harmonize(s);
}

}  // namespace

TEST_CASE("affine_scores trivial smoothers") {
  Dataset data = make_dataset(Eigen::Vector3d(1, 2, 3), Eigen::Vector3d(4, 5, 6));
  const AugmentedProblem problem = make_augmented(data, Eigen::VectorXd::Constant(1, 7.0));

  SUBCASE("identity hat interpolates") {
    const AffineScore s = affine_scores(problem, ScoreModel::dense(Eigen::MatrixXd::Identity(4, 4), Eigen::VectorXd::Zero(4)));
    CHECK(s.a.isZero(0.0));
    CHECK(s.b.isZero(0.0));
  }
  SUBCASE("zero hat scores the raw labels") {
    const AffineScore s = affine_scores(problem, ScoreModel::dense(Eigen::MatrixXd::Zero(4, 4), Eigen::VectorXd::Zero(4)));
    CHECK(s.a == Eigen::Vector4d(4, 5, 6, 0));
    CHECK(s.b == Eigen::Vector4d(0, 0, 0, 1));
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS(affine_scores(problem, ScoreModel::dense(Eigen::MatrixXd::Zero(3, 3), Eigen::VectorXd::Zero(3))));
    CHECK_THROWS(make_augmented(data, Eigen::Vector2d(1, 2)));
  }
}

TEST_CASE("affine_scores reproduce the refit residuals of the LASSO closed form") {
  std::mt19937_64 rng(12);
  const Eigen::MatrixXd X = oracle::gaussian_matrix(9, 3, rng);
  const Eigen::VectorXd y = X * Eigen::Vector3d(2, 0, -1) + oracle::gaussian_vector(9, rng);
  const Dataset data = make_dataset(X, y);
  const Eigen::VectorXd x_new = oracle::gaussian_vector(3, rng);
  const AugmentedProblem problem = make_augmented(data, x_new);
  const SolutionPath path = lars_lasso_path(data);
  for (const PathStep& step : path.steps) {
    const Eigen::MatrixXd XA = select_columns(problem.X_tilde, step.active_set);
    const Eigen::MatrixXd core = (XA.transpose() * XA).inverse();
    const Eigen::VectorXd offset = -(step.lambda / 2.0) * XA * core * step.sign_vector();
    const AffineScore s = affine_scores(problem, ScoreModel::factored(XA, core, offset));
    for (double label : {-10.0, -1.0, 0.0, 0.5, 3.0, 25.0}) {
      Eigen::VectorXd ytilde(10);
      ytilde << y, label;
      const Eigen::VectorXd beta = lasso_closed_form(XA, ytilde, step.lambda, step.sign_vector());
      const Eigen::VectorXd residual = (ytilde - XA * beta).cwiseAbs();
      for (Eigen::Index i = 0; i < 10; ++i) CHECK(std::abs(s.score(i, label) - residual(i)) <= 1e-8 * (1 + std::abs(label)));
    }
    const Eigen::MatrixXd H = ScoreModel::factored(XA, core, offset).hat();
    CHECK((H * H - H).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK((H - H.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("harmonize") {
  std::mt19937_64 rng(4);
  const AffineScore raw{oracle::gaussian_vector(6, rng), oracle::gaussian_vector(6, rng)};
  const AffineScore h = harmonize(raw);
  CHECK((h.b.array() >= 0.0).all());
  for (double y : {-3.0, -0.2, 0.0, 1.7, 40.0}) {
    for (Eigen::Index i = 0; i < 6; ++i) CHECK(h.score(i, y) == raw.score(i, y));
  }
  CHECK(conformal_set(h, 0.3) == conformal_set(harmonize(h), 0.3));
}

TEST_CASE("score_interval cases") {
  auto scores = [](double ai, double bi, double an, double bn) {
    return AffineScore{Eigen::Vector2d(ai, an), Eigen::Vector2d(bi, bn)};
  };
  CHECK(score_interval(0, scores(3, 1, 0, 2)) == IntervalSet{{-1, 3}});
  CHECK(score_interval(0, scores(0, 2, 3, 1)) == IntervalSet{{-kInfinity, -1}, {3, kInfinity}});
  CHECK(score_interval(0, scores(1, 1, 1, 1)) == IntervalSet::real_line());
  CHECK(score_interval(0, scores(2, 1, 0, 1)) == IntervalSet{{-1, kInfinity}});
  CHECK(score_interval(0, scores(0, 1, 2, 1)) == IntervalSet{{-kInfinity, -1}});
  CHECK(score_interval(0, scores(2, 0, 1, 0)) == IntervalSet::real_line());
  CHECK(score_interval(0, scores(1, 0, 2, 0)).is_empty());
  // the query always dominates itself
  CHECK(score_interval(1, scores(3, 1, 0, 2)) == IntervalSet::real_line());
}

TEST_CASE("conformal_set trivial cases") {
  std::mt19937_64 rng(6);
  const AffineScore s = random_scores(7, rng);
  CHECK(conformal_set(s, 0.5 / 7.0) == IntervalSet::real_line());
  CHECK(conformal_set(AffineScore{Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1)}, 0.9) == IntervalSet::real_line());
  CHECK_THROWS(conformal_set(s, 0.0));
  CHECK_THROWS(conformal_set(s, 1.0));
}

TEST_CASE("conformal_set against a grid of direct evaluations") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index n = std::uniform_int_distribution<Eigen::Index>(2, 12)(rng);
    const AffineScore s = random_scores(n, rng);
    const double eps = std::uniform_real_distribution<double>(0.02, 0.98)(rng);
    const IntervalSet set = conformal_set(s, eps);
    const auto crossings = oracle::crossing_points(s.a, s.b);
    const double lo = crossings.empty() ? -10 : crossings.front() - 10, hi = crossings.empty() ? 10 : crossings.back() + 10;
    for (int g = 0; g <= 20000; ++g) {
      const double y = lo + (hi - lo) * g / 20000.0;
      bool near = false;
      for (double c : crossings) near = near || std::abs(c - y) < 1e-9;
      if (!near) CHECK(set.contains(y) == oracle::in_conformal_set(y, s.a, s.b, eps));
    }
  }
}

TEST_CASE("p_value") {
  std::mt19937_64 rng(9);
  SUBCASE("single pair") {
    const AffineScore s{Eigen::VectorXd::Constant(1, 2.0), Eigen::VectorXd::Constant(1, 1.0)};
    CHECK(p_value(-4.0, s) == 1.0);
    CHECK(p_value(10.0, s) == 1.0);
  }
  SUBCASE("zero query score") {
    const AffineScore s{Eigen::Vector3d(1, 2, -3), Eigen::Vector3d(0, 0, 1)};
    CHECK(p_value(3.0, s) == 1.0);
  }
  SUBCASE("range and consistency with conformal_set") {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      const Eigen::Index n = std::uniform_int_distribution<Eigen::Index>(2, 12)(rng);
      const AffineScore s = random_scores(n, rng);
      const auto crossings = oracle::crossing_points(s.a, s.b);
      for (int probe = 0; probe < 200; ++probe) {
        const double y = 20.0 * (u(rng) - 0.5);
        const double eps = 0.01 + 0.98 * u(rng);
        const double p = p_value(y, s);
        CHECK(p >= 1.0 / static_cast<double>(n));
        CHECK(p <= 1.0);
        bool near = false;
        for (double c : crossings) near = near || std::abs(c - y) < 1e-9;
        if (!near && std::abs(p - eps) > 1e-9) CHECK(conformal_set(s, eps).contains(y) == (p >= eps));
      }
    }
  }
}

TEST_CASE("conformal_set is nested in epsilon") {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = std::uniform_int_distribution<Eigen::Index>(2, 15)(rng);
    const AffineScore s = random_scores(n, rng);
    double e1 = std::uniform_real_distribution<double>(0.01, 0.99)(rng);
    double e2 = std::uniform_real_distribution<double>(0.01, 0.99)(rng);
    if (e1 < e2) std::swap(e1, e2);
    CHECK(conformal_set(s, e1).is_subset_of(conformal_set(s, e2)));
  }
}
