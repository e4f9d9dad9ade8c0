#include "conformal.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "error.hpp"

namespace scp {

namespace {

constexpr double kEndpointTolerance = 1e-12;
// slack on n * epsilon so that e.g. 10 * 0.1 counts as exactly 1
constexpr double kThresholdSlack = 1e-9;

// Sign-determining factorization of alpha_i^2 - alpha_n^2.
double comparison(double ai, double bi, double an, double bn, double y) {
  return ((ai - an) + (bi - bn) * y) * ((ai + an) + (bi + bn) * y);
}

std::size_t nearest(const std::vector<double>& points, double v) {
  auto it = std::lower_bound(points.begin(), points.end(), v);
  if (it == points.end()) return points.size() - 1;
  if (it == points.begin()) return 0;
  const auto hi = static_cast<std::size_t>(it - points.begin());
  return (points[hi] - v < v - points[hi - 1]) ? hi : hi - 1;
}

}  // namespace

AugmentedProblem make_augmented(const Dataset& data, const Eigen::VectorXd& x_new) {
  if (x_new.size() != data.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "augment", "query has " + std::to_string(x_new.size()) +
                                                             " covariates, design has " +
                                                             std::to_string(data.cols()));
  }
  AugmentedProblem problem;
  problem.X_tilde.resize(data.rows() + 1, data.cols());
  problem.X_tilde << data.X, x_new.transpose();
  problem.y_known = data.y;
  return problem;
}

ScoreModel ScoreModel::dense(Eigen::MatrixXd hat, Eigen::VectorXd offset) {
  if (hat.rows() != hat.cols() || hat.rows() != offset.size()) {
    throw Error(ErrorKind::DimensionMismatch, "score_model", "hat matrix and offset sizes disagree");
  }
  const double scale = std::max(1.0, hat.cwiseAbs().maxCoeff());
  if ((hat - hat.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw Error(ErrorKind::InvalidArgument, "score_model", "hat matrix is not symmetric");
  }
  ScoreModel m;
  m.is_dense_ = true;
  m.hat_ = std::move(hat);
  m.offset_ = std::move(offset);
  return m;
}

ScoreModel ScoreModel::factored(Eigen::MatrixXd basis, Eigen::MatrixXd core, Eigen::VectorXd offset) {
  if (basis.rows() != offset.size() || core.rows() != basis.cols() || core.cols() != basis.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "score_model", "factored hat and offset sizes disagree");
  }
  ScoreModel m;
  m.is_dense_ = false;
  m.basis_ = std::move(basis);
  // symmetrize away round-off from the inversion
  m.core_ = 0.5 * (core + core.transpose());
  m.offset_ = std::move(offset);
  return m;
}

Eigen::VectorXd ScoreModel::residual_operator(const Eigen::VectorXd& v) const {
  if (is_dense_) return v - hat_ * v;
  if (basis_.cols() == 0) return v;
  return v - basis_ * (core_ * (basis_.transpose() * v));
}

Eigen::MatrixXd ScoreModel::hat() const {
  if (is_dense_) return hat_;
  return basis_ * core_ * basis_.transpose();
}

AffineScore harmonize(AffineScore scores) {
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    if (scores.b(i) < 0.0) {
      scores.a(i) = -scores.a(i);
      scores.b(i) = -scores.b(i);
    }
  }
  return scores;
}

AffineScore affine_scores(const AugmentedProblem& problem, const ScoreModel& model) {
  const Eigen::Index n = problem.size();
  if (problem.y_known.size() + 1 != n || model.size() != n) {
    throw Error(ErrorKind::DimensionMismatch, "affine_scores", "score model does not match the augmented problem");
  }
  Eigen::VectorXd padded = Eigen::VectorXd::Zero(n);
  padded.head(n - 1) = problem.y_known;
  Eigen::VectorXd query = Eigen::VectorXd::Zero(n);
  query(n - 1) = 1.0;
  AffineScore scores;
  scores.a = model.residual_operator(padded) - model.offset();
  scores.b = model.residual_operator(query);
  return harmonize(std::move(scores));
}

IntervalSet score_interval(Eigen::Index i, const AffineScore& scores) {
  const Eigen::Index last = scores.size() - 1;
  const double ai = scores.a(i), bi = scores.b(i);
  const double an = scores.a(last), bn = scores.b(last);

  if (bi != bn) {
    const double r1 = -(ai - an) / (bi - bn);
    const double r2 = -(ai + an) / (bi + bn);
    const double l = std::min(r1, r2);
    const double u = std::max(r1, r2);
    if (l < u) {
      if (comparison(ai, bi, an, bn, 0.5 * (l + u)) >= 0.0) return IntervalSet{{l, u}};
      return IntervalSet{{-kInfinity, l}, {u, kInfinity}};
    }
    if (comparison(ai, bi, an, bn, l + 1.0) >= 0.0) return IntervalSet::real_line();
    return IntervalSet{{l, l}};
  }
  if (bn != 0.0) {
    if (ai == an) return IntervalSet::real_line();
    const double l = -(ai + an) / (2.0 * bn);
    if (comparison(ai, bi, an, bn, l + 1.0) >= 0.0) return IntervalSet{{l, kInfinity}};
    return IntervalSet{{-kInfinity, l}};
  }
  return std::abs(ai) >= std::abs(an) ? IntervalSet::real_line() : IntervalSet::empty();
}

IntervalSet conformal_set(const AffineScore& scores, double epsilon) {
  const Eigen::Index n = scores.size();
  if (n < 1 || scores.b.size() != n) {
    throw Error(ErrorKind::DimensionMismatch, "conformal_set", "empty or inconsistent scores");
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "conformal_set", "epsilon must lie in (0, 1)");
  }

  std::vector<IntervalSet> sets;
  sets.reserve(static_cast<std::size_t>(n));
  std::vector<double> points;
  for (Eigen::Index i = 0; i < n; ++i) {
    sets.push_back(score_interval(i, scores));
    for (const Interval& iv : sets.back().intervals()) {
      if (std::isfinite(iv.lo)) points.push_back(iv.lo);
      if (std::isfinite(iv.hi)) points.push_back(iv.hi);
    }
  }
  std::sort(points.begin(), points.end());
  std::vector<double> pool;
  for (double v : points) {
    if (pool.empty() || v - pool.back() > kEndpointTolerance) pool.push_back(v);
  }

  // Slots alternate open gaps and pooled points: gap 0, point 0, gap 1, ...,
  // point m-1, gap m. Each closed S_i interval covers a contiguous slot range.
  const std::size_t m = pool.size();
  std::vector<long> delta(2 * m + 2, 0);
  for (const IntervalSet& s : sets) {
    for (const Interval& iv : s.intervals()) {
      const std::size_t first = std::isfinite(iv.lo) ? 2 * nearest(pool, iv.lo) + 1 : 0;
      const std::size_t last = std::isfinite(iv.hi) ? 2 * nearest(pool, iv.hi) + 1 : 2 * m;
      delta[first] += 1;
      delta[last + 1] -= 1;
    }
  }

  const double needed = static_cast<double>(n) * epsilon - kThresholdSlack;
  std::vector<Interval> out;
  long count = 0;
  for (std::size_t slot = 0; slot <= 2 * m; ++slot) {
    count += delta[slot];
    if (static_cast<double>(count) < needed) continue;
    if (slot % 2 == 0) {
      const std::size_t gap = slot / 2;
      out.push_back({gap == 0 ? -kInfinity : pool[gap - 1], gap == m ? kInfinity : pool[gap]});
    } else {
      const double y = pool[slot / 2];
      out.push_back({y, y});
    }
  }
  return IntervalSet(std::move(out));
}

Eigen::Index conformity_count(double y, const AffineScore& scores) {
  const Eigen::Index last = scores.size() - 1;
  const double query = scores.score(last, y);
  Eigen::Index count = 0;
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    if (scores.score(i, y) >= query) ++count;
  }
  return count;
}

double p_value(double y, const AffineScore& scores) {
  return static_cast<double>(conformity_count(y, scores)) / static_cast<double>(scores.size());
}

}  // namespace scp
