#include "simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "error.hpp"
#include "fixed_lambda.hpp"
#include "parallel.hpp"

namespace scp {

namespace {

double median(std::vector<double> values) {
  if (values.empty()) return std::nan("");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  // inf + finite and inf + inf both stay inf
  return 0.5 * (values[mid - 1] + values[mid]);
}

}  // namespace

GaussianSampler::GaussianSampler(const Eigen::MatrixXd& covariance) {
  constexpr const char* stage = "gaussian_sampler";
  const Eigen::Index p = covariance.rows();
  if (covariance.cols() != p) throw Error(ErrorKind::DimensionMismatch, stage, "covariance must be square");

  group_.assign(static_cast<std::size_t>(p), -1);
  scale_.resize(p);
  std::vector<Eigen::Index> representatives;
  for (Eigen::Index j = 0; j < p; ++j) {
    if (!(covariance(j, j) > 0.0)) throw Error(ErrorKind::InvalidArgument, stage, "variances must be positive");
    for (std::size_t r = 0; r < representatives.size(); ++r) {
      const Eigen::Index k = representatives[r];
      const double perfect = std::sqrt(covariance(j, j) * covariance(k, k));
      if (std::abs(covariance(j, k) - perfect) <= 1e-12 * perfect) {
        group_[static_cast<std::size_t>(j)] = static_cast<Eigen::Index>(r);
        scale_(j) = std::sqrt(covariance(j, j) / covariance(k, k));
        break;
      }
    }
    if (group_[static_cast<std::size_t>(j)] < 0) {
      group_[static_cast<std::size_t>(j)] = static_cast<Eigen::Index>(representatives.size());
      scale_(j) = 1.0;
      representatives.push_back(j);
    }
  }

  const auto q = static_cast<Eigen::Index>(representatives.size());
  Eigen::MatrixXd latent(q, q);
  for (Eigen::Index a = 0; a < q; ++a) {
    for (Eigen::Index b = 0; b < q; ++b) {
      latent(a, b) = covariance(representatives[static_cast<std::size_t>(a)], representatives[static_cast<std::size_t>(b)]);
    }
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(latent);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::InvalidArgument, stage, "covariance is not positive definite after grouping");
  }
  factor_ = llt.matrixL();
}

Eigen::MatrixXd GaussianSampler::draw(Eigen::Index rows, std::mt19937_64& rng) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::Index q = factor_.rows();
  Eigen::MatrixXd z(rows, q);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index a = 0; a < q; ++a) z(i, a) = normal(rng);
  }
  const Eigen::MatrixXd latent = z * factor_.transpose();
  Eigen::MatrixXd x(rows, dimension());
  for (Eigen::Index j = 0; j < dimension(); ++j) x.col(j) = scale_(j) * latent.col(group_[static_cast<std::size_t>(j)]);
  return x;
}

std::vector<int> ExampleSpec::true_support() const {
  std::vector<int> support;
  for (Eigen::Index j = 0; j < beta_star.size(); ++j) {
    if (beta_star(j) != 0.0) support.push_back(static_cast<int>(j));
  }
  return support;
}

ExampleSpec make_example(char id, int n, double sigma) {
  constexpr const char* stage = "make_example";
  if (n < 3) throw Error(ErrorKind::InvalidArgument, stage, "n must be at least 3");
  if (!(sigma >= 0.0)) throw Error(ErrorKind::InvalidArgument, stage, "sigma must be nonnegative");
  constexpr int p = kExampleDimension;
  ExampleSpec spec;
  spec.id = id;
  spec.n = n;
  spec.sigma = sigma;
  spec.beta_star = Eigen::VectorXd::Zero(p);
  spec.covariance = Eigen::MatrixXd::Identity(p, p);

  // 1-based variable numbering below, as in the design descriptions
  auto beta = [&](int j) -> double& { return spec.beta_star(j - 1); };
  auto cov = [&](int j, int k) -> double& { return spec.covariance(j - 1, k - 1); };
  auto exp_decay = [&](int from, int to) {
    for (int j = from; j <= to; ++j) {
      for (int k = from; k <= to; ++k) cov(j, k) = std::exp(-std::abs(j - k));
    }
  };

  switch (id) {
    case 'a':
      beta(1) = 5.0;
      exp_decay(15, 35);
      break;
    case 'b':
      for (int j = 1; j <= 5; ++j) beta(j) = -5.0 + 0.2 * j;
      for (int j = 10; j <= 25; ++j) beta(j) = 4.0 + 0.2 * j;
      exp_decay(15, 35);
      break;
    case 'c':
      for (int j = 1; j <= 15; ++j) beta(j) = 5.0;
      for (int block = 0; block < 3; ++block) {
        for (int j = 5 * block + 1; j <= 5 * block + 5; ++j) {
          for (int k = 5 * block + 1; k <= 5 * block + 5; ++k) cov(j, k) = 1.0;
        }
      }
      break;
    case 'd':
      for (int j = 1; j <= p; ++j) beta(j) = 3.0 + 0.2 * j;
      exp_decay(1, p);
      break;
    default:
      throw Error(ErrorKind::InvalidArgument, stage, std::string("unknown example '") + id + "'");
  }
  return spec;
}

GeneratedExample generate_example(const ExampleSpec& spec, std::mt19937_64& rng) {
  const GaussianSampler sampler(spec.covariance);
  const Eigen::MatrixXd x = sampler.draw(spec.n, rng);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd y = x * spec.beta_star;
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += spec.sigma * normal(rng);

  GeneratedExample out;
  const Eigen::Index train = spec.n - 1;
  out.data = make_dataset(x.topRows(train), y.head(train));
  out.x_new = x.row(train).transpose();
  out.y_new = y(train);
  return out;
}

GeneratedExample generate_example(const ExampleSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return generate_example(spec, rng);
}

std::mt19937_64 replication_rng(std::uint64_t seed, std::uint64_t rep) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(rep), static_cast<std::uint32_t>(rep >> 32)};
  return std::mt19937_64(seq);
}

SelectionMetrics selection_metrics(const std::vector<std::vector<int>>& selected_sets,
                                   const std::vector<int>& true_support, int dimension) {
  SelectionMetrics m;
  m.frequency.assign(static_cast<std::size_t>(dimension), 0.0);
  if (selected_sets.empty()) return m;
  std::vector<char> relevant(static_cast<std::size_t>(dimension), 0);
  for (int j : true_support) {
    if (j < 0 || j >= dimension) throw Error(ErrorKind::InvalidArgument, "selection_metrics", "index out of range");
    relevant[static_cast<std::size_t>(j)] = 1;
  }
  double precision_sum = 0.0, recall_sum = 0.0;
  int precision_count = 0;
  for (const auto& selected : selected_sets) {
    int hits = 0;
    for (int j : selected) {
      if (j < 0 || j >= dimension) throw Error(ErrorKind::InvalidArgument, "selection_metrics", "index out of range");
      m.frequency[static_cast<std::size_t>(j)] += 1.0;
      hits += relevant[static_cast<std::size_t>(j)];
    }
    if (!selected.empty()) {
      precision_sum += static_cast<double>(hits) / static_cast<double>(selected.size());
      ++precision_count;
    }
    recall_sum += true_support.empty() ? 1.0 : static_cast<double>(hits) / static_cast<double>(true_support.size());
  }
  for (double& f : m.frequency) f /= static_cast<double>(selected_sets.size());
  m.precision = precision_count > 0 ? precision_sum / precision_count : 0.0;
  m.recall = recall_sum / static_cast<double>(selected_sets.size());
  return m;
}

double binomial_half_width(double frequency, int reps) {
  if (reps <= 0) return 0.0;
  return 1.96 * std::sqrt(frequency * (1.0 - frequency) / reps);
}

ExperimentResult validity_experiment(const ExperimentConfig& config) {
  if (config.reps < 1) throw Error(ErrorKind::InvalidArgument, "validity_experiment", "reps must be at least 1");

  struct Outcome {
    bool ok = false;
    bool covered = false;
    bool unbounded = false;
    double length = 0.0;
    double ratio = 0.0;
    double lambda = 0.0;
    std::vector<int> active;
    StepTrace trace;
    std::string error;
  };
  std::vector<Outcome> outcomes(static_cast<std::size_t>(config.reps));

  PredictOptions options;
  options.epsilon = config.epsilon;
  options.variant = config.variant;
  options.rule = config.rule;
  options.standardize = config.standardize;
  options.threads = 1;

  parallel_for(outcomes.size(), config.threads, [&](std::size_t rep) {
    Outcome& out = outcomes[rep];
    std::mt19937_64 rng = replication_rng(config.seed, rep);
    const GeneratedExample ex = generate_example(config.example, rng);
    try {
      PredictOptions local = options;
      local.true_label = ex.y_new;
      const PredictionReport report = predict(ex.data, ex.x_new, local);
      out.ok = true;
      out.covered = report.final_set.contains(ex.y_new);
      out.unbounded = !report.warnings.empty();
      out.length = report.length;
      out.lambda = report.selected_lambda;
      out.active = report.active_variables;
      double lo = kInfinity, hi = 0.0;
      for (double len : report.lengths) {
        lo = std::min(lo, len);
        if (std::isfinite(len)) hi = std::max(hi, len);
      }
      out.ratio = lo > 0.0 ? hi / lo : kInfinity;
      if (config.keep_traces) out.trace = StepTrace{report.lambdas, report.lengths};
    } catch (const Error& e) {
      out.error = e.what();
    }
  });

  ExperimentResult result;
  result.example = config.example.id;
  result.n = config.example.n;
  result.sigma = config.example.sigma;
  result.epsilon = config.epsilon;
  result.variant = to_string(config.variant.kind);
  result.rule = to_string(config.rule.kind);
  result.seed = config.seed;
  result.reps = config.reps;

  std::vector<double> lengths;
  std::vector<std::vector<int>> selections;
  double finite_sum = 0.0;
  int finite_count = 0;
  for (const Outcome& out : outcomes) {
    if (!out.ok) {
      ++result.failed_reps;
      result.errors.push_back(out.error);
      continue;
    }
    ++result.completed_reps;
    result.covered_reps += out.covered ? 1 : 0;
    result.unbounded_reps += out.unbounded ? 1 : 0;
    lengths.push_back(out.length);
    if (std::isfinite(out.length)) {
      finite_sum += out.length;
      ++finite_count;
    }
    selections.push_back(out.active);
    result.length_ratios.push_back(out.ratio);
    result.selected_lambdas.push_back(out.lambda);
    if (config.keep_traces) result.traces.push_back(out.trace);
  }
  if (result.completed_reps > 0) {
    result.validity_freq = static_cast<double>(result.covered_reps) / result.completed_reps;
  }
  result.ci_half_width = binomial_half_width(result.validity_freq, result.completed_reps);
  result.median_length = median(lengths);
  result.mean_length_finite = finite_count > 0 ? finite_sum / finite_count : std::nan("");
  result.selection = selection_metrics(selections, config.example.true_support(), kExampleDimension);
  return result;
}

FixedLambdaStudy fixed_lambda_experiment(const ExampleSpec& example, double epsilon, double lambda, int reps,
                                         std::uint64_t seed, int threads) {
  if (reps < 1) throw Error(ErrorKind::InvalidArgument, "fixed_lambda_experiment", "reps must be at least 1");
  std::vector<char> covered(static_cast<std::size_t>(reps), 0);
  std::vector<double> lengths(static_cast<std::size_t>(reps), 0.0);
  parallel_for(covered.size(), threads, [&](std::size_t rep) {
    std::mt19937_64 rng = replication_rng(seed, rep);
    const GeneratedExample ex = generate_example(example, rng);
    const FixedLambdaResult r = fixed_lambda_conformal_set(ex.data, ex.x_new, lambda, epsilon);
    covered[rep] = r.set.contains(ex.y_new) ? 1 : 0;
    lengths[rep] = r.set.lebesgue_length();
  });
  FixedLambdaStudy study;
  study.lambda = lambda;
  study.reps = reps;
  study.covered = static_cast<int>(std::count(covered.begin(), covered.end(), 1));
  study.coverage = static_cast<double>(study.covered) / reps;
  study.median_length = median(lengths);
  return study;
}

double pilot_lambda(const ExperimentConfig& config) {
  const ExperimentResult pilot = validity_experiment(config);
  if (pilot.selected_lambdas.empty()) {
    throw Error(ErrorKind::EmptyPath, "pilot_lambda", "no pilot replication completed");
  }
  return median(pilot.selected_lambdas);
}

}  // namespace scp
