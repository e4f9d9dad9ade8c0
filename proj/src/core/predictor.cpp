#include "predictor.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"
#include "parallel.hpp"

namespace scp {

namespace {

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& full, const std::vector<int>& idx) {
  const auto q = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd out(q, q);
  for (Eigen::Index r = 0; r < q; ++r) {
    for (Eigen::Index c = 0; c < q; ++c) out(r, c) = full(idx[static_cast<std::size_t>(r)], idx[static_cast<std::size_t>(c)]);
  }
  return out;
}

Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& m, const char* what) {
  if (m.rows() == 0) return m;
  const Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::SingularGram, "score_model", std::string(what) + " is not positive definite");
  }
  return llt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
}

// Caches X~'X~ so that each step only slices it.
class ScoreModelFactory {
 public:
  ScoreModelFactory(const AugmentedProblem& problem, const VariantSpec& variant)
      : problem_(problem), variant_(variant), gram_(problem.X_tilde.transpose() * problem.X_tilde) {}

  ScoreModel operator()(const PathStep& step) const {
    const Eigen::Index n = problem_.size();
    const double ridge = variant_.ridge_weight.value_or(step.lambda);
    switch (variant_.kind) {
      case VariantKind::CoRP: {
        const Eigen::Index p = problem_.X_tilde.cols();
        Eigen::MatrixXd core =
            spd_inverse(gram_ + ridge * Eigen::MatrixXd::Identity(p, p), "ridge Gram matrix");
        return ScoreModel::factored(problem_.X_tilde, std::move(core), Eigen::VectorXd::Zero(n));
      }
      case VariantKind::CoRLaP: {
        const auto q = static_cast<Eigen::Index>(step.active_set.size());
        Eigen::MatrixXd core = spd_inverse(
            submatrix(gram_, step.active_set) + ridge * Eigen::MatrixXd::Identity(q, q), "ridge Gram matrix");
        return ScoreModel::factored(select_columns(problem_.X_tilde, step.active_set), std::move(core),
                                    Eigen::VectorXd::Zero(n));
      }
      case VariantKind::CoLP: {
        Eigen::MatrixXd basis = select_columns(problem_.X_tilde, step.active_set);
        Eigen::MatrixXd core = spd_inverse(submatrix(gram_, step.active_set), "active Gram matrix");
        Eigen::VectorXd offset = -0.5 * step.lambda * (basis * (core * step.sign_vector()));
        return ScoreModel::factored(std::move(basis), std::move(core), std::move(offset));
      }
      case VariantKind::CENeP:
      case VariantKind::CoSmoLaP: {
        const auto q = static_cast<Eigen::Index>(step.active_set.size());
        const PenaltyKind kind =
            variant_.kind == VariantKind::CENeP ? PenaltyKind::Identity : PenaltyKind::FusedDifference;
        Eigen::MatrixXd basis = select_columns(problem_.X_tilde, step.active_set);
        const Eigen::MatrixXd gram = submatrix(gram_, step.active_set);
        Eigen::MatrixXd core =
            spd_inverse(gram + variant_.penalty_weight * penalty_matrix(kind, q), "penalized Gram matrix");
        const double scale = variant_.halve_penalty_offset ? 0.5 : 1.0;
        const Eigen::VectorXd direction = spd_inverse(gram, "active Gram matrix") * step.sign_vector();
        Eigen::VectorXd offset = -scale * step.lambda * (basis * direction);
        return ScoreModel::factored(std::move(basis), std::move(core), std::move(offset));
      }
    }
    throw Error(ErrorKind::InvalidArgument, "score_model", "unknown variant");
  }

 private:
  const AugmentedProblem& problem_;
  const VariantSpec& variant_;
  Eigen::MatrixXd gram_;
};

SolutionPath variant_path(const Dataset& data, const VariantSpec& variant) {
  switch (variant.kind) {
    case VariantKind::CENeP:
      return penalized_path(data, {PenaltyKind::Identity, variant.penalty_weight});
    case VariantKind::CoSmoLaP:
      return penalized_path(data, {PenaltyKind::FusedDifference, variant.penalty_weight});
    default:
      return lars_lasso_path(data);
  }
}

std::size_t argmin_length(const PredictorFamily& family, std::size_t limit) {
  if (family.sets.empty() || limit == 0) {
    throw Error(ErrorKind::EmptyPath, "select", "no candidate sets to select from");
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < limit; ++k) {
    if (family.sets[k].length < family.sets[best].length) best = k;
  }
  if (!std::isfinite(family.sets[best].length)) {
    throw Error(ErrorKind::AllUnbounded, "select", "every candidate set has infinite length");
  }
  return best;
}

std::vector<double> lengths_of(const PredictorFamily& family) {
  std::vector<double> out;
  out.reserve(family.sets.size());
  for (const CandidateSet& c : family.sets) out.push_back(c.length);
  return out;
}

IntervalSet shift(const IntervalSet& set, double by) {
  std::vector<Interval> out;
  for (const Interval& iv : set.intervals()) out.push_back({iv.lo + by, iv.hi + by});
  return IntervalSet(std::move(out));
}

}  // namespace

const char* to_string(VariantKind kind) noexcept {
  switch (kind) {
    case VariantKind::CoLP: return "colp";
    case VariantKind::CoRP: return "corp";
    case VariantKind::CoRLaP: return "corlap";
    case VariantKind::CENeP: return "cenep";
    case VariantKind::CoSmoLaP: return "cosmolap";
  }
  return "unknown";
}

const char* to_string(RuleKind kind) noexcept {
  switch (kind) {
    case RuleKind::Smallest: return "smallest";
    case RuleKind::EarlyStopped: return "early-stop";
    case RuleKind::NPreviousNeighbors: return "n-pn";
  }
  return "unknown";
}

std::optional<VariantKind> parse_variant(const std::string& name) {
  for (VariantKind k : {VariantKind::CoLP, VariantKind::CoRP, VariantKind::CoRLaP, VariantKind::CENeP,
                        VariantKind::CoSmoLaP}) {
    if (name == to_string(k)) return k;
  }
  return std::nullopt;
}

std::optional<RuleKind> parse_rule(const std::string& name) {
  for (RuleKind k : {RuleKind::Smallest, RuleKind::EarlyStopped, RuleKind::NPreviousNeighbors}) {
    if (name == to_string(k)) return k;
  }
  return std::nullopt;
}

ScoreModel make_score_model(const AugmentedProblem& problem, const PathStep& step, const VariantSpec& variant) {
  return ScoreModelFactory(problem, variant)(step);
}

PredictorFamily build_family(const Dataset& data, const Eigen::VectorXd& x_new, double epsilon,
                             const VariantSpec& variant, int threads) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "build_family", "epsilon must lie in (0, 1)");
  }
  if (variant.ridge_weight && !(*variant.ridge_weight >= 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "build_family", "ridge weight must be nonnegative");
  }
  const SolutionPath path = variant_path(data, variant);
  if (path.steps.empty()) {
    throw Error(ErrorKind::EmptyPath, "build_family", "the regularization path has no transition points");
  }
  const AugmentedProblem problem = make_augmented(data, x_new);
  const ScoreModelFactory factory(problem, variant);

  PredictorFamily family;
  family.sets.resize(path.steps.size());
  parallel_for(path.steps.size(), threads, [&](std::size_t k) {
    const PathStep& step = path.steps[k];
    CandidateSet& out = family.sets[k];
    out.lambda = step.lambda;
    out.active_set = step.active_set;
    out.scores = affine_scores(problem, factory(step));
    out.set = conformal_set(out.scores, epsilon);
    out.length = out.set.lebesgue_length();
  });
  return family;
}

std::optional<std::size_t> early_stop_index(const std::vector<double>& lengths, double factor) {
  for (std::size_t k = 1; k < lengths.size(); ++k) {
    if (lengths[k] > factor * lengths[k - 1]) return k;
  }
  return std::nullopt;
}

PredictorFamily select_smallest(PredictorFamily family) {
  const std::size_t best = argmin_length(family, family.sets.size());
  family.selected = best;
  family.rule = RuleKind::Smallest;
  family.stopped_at.reset();
  family.final_set = family.sets[best].set;
  return family;
}

PredictorFamily select_early_stopped(PredictorFamily family, double factor) {
  if (!(factor > 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "select_early_stopped", "early-stop factor must exceed 1");
  }
  family.stopped_at = early_stop_index(lengths_of(family), factor);
  const std::size_t best = argmin_length(family, family.stopped_at.value_or(family.sets.size()));
  family.selected = best;
  family.rule = RuleKind::EarlyStopped;
  family.final_set = family.sets[best].set;
  return family;
}

PredictorFamily select_n_previous_neighbors(PredictorFamily family, int neighbors, double factor) {
  if (neighbors < 1) {
    throw Error(ErrorKind::InvalidArgument, "select_n_previous_neighbors", "neighbour count must be positive");
  }
  family = select_early_stopped(std::move(family), factor);
  const std::size_t k = *family.selected;
  const std::size_t first = k + 1 >= static_cast<std::size_t>(neighbors) ? k + 1 - static_cast<std::size_t>(neighbors) : 0;
  IntervalSet united = family.sets[k].set;
  for (std::size_t j = first; j < k; ++j) united = united.unite(family.sets[j].set);
  family.final_set = std::move(united);
  family.rule = RuleKind::NPreviousNeighbors;
  return family;
}

PredictorFamily apply_rule(PredictorFamily family, const SelectionRule& rule) {
  switch (rule.kind) {
    case RuleKind::Smallest: return select_smallest(std::move(family));
    case RuleKind::EarlyStopped: return select_early_stopped(std::move(family), rule.early_stop_factor);
    case RuleKind::NPreviousNeighbors:
      return select_n_previous_neighbors(std::move(family), rule.neighbors, rule.early_stop_factor);
  }
  throw Error(ErrorKind::InvalidArgument, "select", "unknown selection rule");
}

PredictionReport predict(const Dataset& data, const Eigen::VectorXd& x_new, const PredictOptions& options) {
  validate(data);
  Dataset working = data;
  Eigen::VectorXd query = x_new;
  double response_shift = 0.0;
  if (options.standardize) {
    const Standardization st = Standardization::fit(data);
    working = st.apply(data);
    if (x_new.size() != data.cols()) {
      throw Error(ErrorKind::DimensionMismatch, "predict", "query dimension does not match the design");
    }
    query = st.apply_row(x_new);
    response_shift = st.response_mean;
  }

  PredictorFamily family = build_family(working, query, options.epsilon, options.variant, options.threads);

  PredictionReport report;
  try {
    family = apply_rule(family, options.rule);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::AllUnbounded) throw;
    // every candidate is unbounded (e.g. epsilon < 1/n): report the sparsest one
    report.warnings.emplace_back(e.what());
    family.selected = 0;
    family.rule = options.rule.kind;
    family.final_set = family.sets.front().set;
  }

  const std::size_t nu = *family.selected;
  report.final_set = shift(family.final_set, response_shift);
  report.length = report.final_set.lebesgue_length();
  report.selected_index = nu;
  report.selected_lambda = family.sets[nu].lambda;
  report.active_variables = family.sets[nu].active_set;
  report.lengths = lengths_of(family);
  for (const CandidateSet& c : family.sets) report.lambdas.push_back(c.lambda);
  report.early_stop_at = early_stop_index(report.lengths, options.rule.early_stop_factor);
  for (std::size_t k = 0; k < family.sets.size(); ++k) {
    report.stopped.push_back(report.early_stop_at && k >= *report.early_stop_at);
  }
  report.beyond_early_stop = report.early_stop_at && nu >= *report.early_stop_at;
  if (options.true_label) {
    const double label = *options.true_label - response_shift;
    for (const CandidateSet& c : family.sets) report.true_label_p_values.push_back(p_value(label, c.scores));
    report.covered = report.final_set.contains(*options.true_label);
  }
  return report;
}

}  // namespace scp
