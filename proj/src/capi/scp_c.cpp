#include "scp/scp.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>
#include <string>

#include "csv_reader.hpp"
#include "error.hpp"
#include "parallel.hpp"
#include "path_solver.hpp"
#include "predictor.hpp"
#include "report_json.hpp"
#include "simulation.hpp"
#include "version.hpp"

struct scp_dataset {
  scp::Dataset data;
  std::optional<Eigen::VectorXd> x_new;
  std::optional<double> y_new;
  std::optional<std::size_t> query_row;
};

struct scp_path {
  scp::Dataset data;
  scp::SolutionPath path;
};

struct scp_report {
  scp::PredictionReportDocument doc;
};

struct scp_experiment {
  scp::ExperimentResult result;
};

namespace {

thread_local std::string last_error;
thread_local std::string last_error_kind;

scp_status record(scp_status status, const std::string& kind, const std::string& message) {
  last_error_kind = kind;
  last_error = message;
  return status;
}

scp_status status_of(scp::ErrorKind kind) {
  switch (scp::classify(kind)) {
    case scp::ErrorClass::Usage:
      return SCP_ERR_USAGE;
    case scp::ErrorClass::Data:
      return SCP_ERR_DATA;
    case scp::ErrorClass::Numerical:
      return SCP_ERR_NUMERICAL;
  }
  return SCP_ERR_INTERNAL;
}

// Runs `body`, translating exceptions into status codes and the thread-local message.
template <class Body>
scp_status guarded(Body&& body) {
  try {
    body();
    last_error.clear();
    last_error_kind.clear();
    return SCP_OK;
  } catch (const scp::Error& e) {
    return record(status_of(e.kind()), scp::to_string(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return record(SCP_ERR_INTERNAL, "OutOfMemory", "allocation failed");
  } catch (const std::exception& e) {
    return record(SCP_ERR_INTERNAL, "Internal", e.what());
  }
}

void require(bool condition, const char* stage, const char* what) {
  if (!condition) throw scp::Error(scp::ErrorKind::InvalidArgument, stage, what);
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

scp::VariantKind variant_of(int v) {
  require(v >= SCP_VARIANT_COLP && v <= SCP_VARIANT_COSMOLAP, "options", "unknown variant");
  return static_cast<scp::VariantKind>(v);
}

scp::RuleKind rule_of(int r) {
  require(r >= SCP_RULE_SMALLEST && r <= SCP_RULE_N_PREVIOUS_NEIGHBORS, "options", "unknown rule");
  return static_cast<scp::RuleKind>(r);
}

int threads_of(int t) { return t > 0 ? t : scp::default_thread_count(); }

}  // namespace

extern "C" {

const char* scp_version(void) { return scp::kSoftwareVersion; }
const char* scp_last_error(void) { return last_error.c_str(); }
const char* scp_last_error_kind(void) { return last_error_kind.c_str(); }
void scp_string_free(char* s) { std::free(s); }

void scp_csv_options_default(scp_csv_options* o) {
  if (!o) return;
  o->policy = SCP_QUERY_LAST_ROW_UNLABELED;
  o->index = 0;
  o->seed = 0;
  o->response = nullptr;
}

void scp_predict_options_default(scp_predict_options* o) {
  if (!o) return;
  o->epsilon = 0.1;
  o->variant = SCP_VARIANT_COLP;
  o->rule = SCP_RULE_SMALLEST;
  o->penalty_weight = 1.0;
  o->has_ridge_weight = 0;
  o->ridge_weight = 0.0;
  o->halve_penalty_offset = 0;
  o->early_stop_factor = 10.0;
  o->neighbors = 2;
  o->standardize = 0;
  o->threads = 0;
  o->use_true_label = 1;
  o->seed = 0;
}

void scp_simulate_options_default(scp_simulate_options* o) {
  if (!o) return;
  o->example = 'a';
  o->n = 300;
  o->sigma = 1.0;
  o->reps = 100;
  o->epsilon = 0.1;
  o->variant = SCP_VARIANT_COLP;
  o->rule = SCP_RULE_SMALLEST;
  o->penalty_weight = 1.0;
  o->early_stop_factor = 10.0;
  o->neighbors = 2;
  o->standardize = 0;
  o->threads = 0;
  o->keep_traces = 0;
  o->seed = 1;
}

scp_status scp_parse_variant(const char* name, int* variant) {
  return guarded([&] {
    require(name && variant, "parse_variant", "null argument");
    const auto v = scp::parse_variant(name);
    if (!v) throw scp::Error(scp::ErrorKind::InvalidArgument, "parse_variant", std::string("unknown variant '") + name + "'");
    *variant = static_cast<int>(*v);
  });
}

scp_status scp_parse_rule(const char* name, int* rule) {
  return guarded([&] {
    require(name && rule, "parse_rule", "null argument");
    const auto r = scp::parse_rule(name);
    if (!r) throw scp::Error(scp::ErrorKind::InvalidArgument, "parse_rule", std::string("unknown rule '") + name + "'");
    *rule = static_cast<int>(*r);
  });
}

scp_status scp_dataset_from_csv(const char* path, const scp_csv_options* options, scp_dataset** out) {
  return guarded([&] {
    require(path && out, "parse_dataset_csv", "null argument");
    scp_csv_options o;
    scp_csv_options_default(&o);
    if (options) o = *options;
    require(o.policy >= SCP_QUERY_LAST_ROW_UNLABELED && o.policy <= SCP_QUERY_RANDOM_WITH_SEED, "parse_dataset_csv",
            "unknown query row policy");
    scp::CsvOptions csv;
    csv.policy = static_cast<scp::QueryRowPolicy>(o.policy);
    csv.index = o.index;
    csv.seed = o.seed;
    csv.response = o.response ? o.response : "";
    scp::CsvDataset parsed = scp::parse_dataset_csv(path, csv);
    *out = new scp_dataset{std::move(parsed.data), std::move(parsed.x_new), parsed.y_new, parsed.query_row};
  });
}

scp_status scp_dataset_from_labeled_csv(const char* path, const char* response, scp_dataset** out) {
  return guarded([&] {
    require(path && out, "parse_dataset_csv", "null argument");
    *out = new scp_dataset{scp::parse_labeled_csv(path, response ? response : ""), std::nullopt, std::nullopt,
                           std::nullopt};
  });
}

scp_status scp_dataset_from_arrays(const double* X, const double* y, size_t n, size_t p, const double* x_new,
                                   scp_dataset** out) {
  return guarded([&] {
    require(X && y && out, "dataset_from_arrays", "null argument");
    const auto rows = static_cast<Eigen::Index>(n);
    const auto cols = static_cast<Eigen::Index>(p);
    Eigen::MatrixXd M = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(X, rows, cols);
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(y, rows);
    auto* d = new scp_dataset{scp::make_dataset(std::move(M), std::move(v)), std::nullopt, std::nullopt, std::nullopt};
    if (x_new) d->x_new = Eigen::Map<const Eigen::VectorXd>(x_new, cols);
    *out = d;
  });
}

size_t scp_dataset_rows(const scp_dataset* d) { return d ? static_cast<size_t>(d->data.rows()) : 0; }
size_t scp_dataset_cols(const scp_dataset* d) { return d ? static_cast<size_t>(d->data.cols()) : 0; }
int scp_dataset_has_query(const scp_dataset* d) { return d && d->x_new ? 1 : 0; }

int scp_dataset_query_label(const scp_dataset* d, double* label) {
  if (!d || !d->y_new) return 0;
  if (label) *label = *d->y_new;
  return 1;
}

void scp_dataset_free(scp_dataset* d) { delete d; }

scp_status scp_path_compute(const scp_dataset* data, int penalty, double mu, scp_path** out) {
  return guarded([&] {
    require(data && out, "path", "null argument");
    scp::SolutionPath path;
    switch (penalty) {
      case SCP_PENALTY_NONE:
        path = scp::lars_lasso_path(data->data);
        break;
      case SCP_PENALTY_IDENTITY:
        path = scp::penalized_path(data->data, {scp::PenaltyKind::Identity, mu});
        break;
      case SCP_PENALTY_FUSED:
        path = scp::penalized_path(data->data, {scp::PenaltyKind::FusedDifference, mu});
        break;
      default:
        throw scp::Error(scp::ErrorKind::InvalidArgument, "path", "unknown penalty");
    }
    *out = new scp_path{data->data, std::move(path)};
  });
}

size_t scp_path_step_count(const scp_path* p) { return p ? p->path.steps.size() : 0; }

double scp_path_lambda(const scp_path* p, size_t step) {
  if (!p || step >= p->path.steps.size()) return 0.0;
  return p->path.steps[step].lambda;
}

scp_status scp_path_to_json(const scp_path* p, char** json) {
  return guarded([&] {
    require(p && json, "path_to_json", "null argument");
    *json = duplicate(scp::dump_json(scp::to_json(p->path, p->data)));
  });
}

void scp_path_free(scp_path* p) { delete p; }

scp_status scp_predict(const scp_dataset* data, const scp_predict_options* options, scp_report** out) {
  return guarded([&] {
    require(data && out, "predict", "null argument");
    require(data->x_new.has_value(), "predict", "dataset has no query row");
    scp_predict_options o;
    scp_predict_options_default(&o);
    if (options) o = *options;

    scp::PredictOptions opts;
    opts.epsilon = o.epsilon;
    opts.variant.kind = variant_of(o.variant);
    opts.variant.penalty_weight = o.penalty_weight;
    if (o.has_ridge_weight) opts.variant.ridge_weight = o.ridge_weight;
    opts.variant.halve_penalty_offset = o.halve_penalty_offset != 0;
    opts.rule.kind = rule_of(o.rule);
    opts.rule.early_stop_factor = o.early_stop_factor;
    opts.rule.neighbors = o.neighbors;
    opts.standardize = o.standardize != 0;
    opts.threads = threads_of(o.threads);
    if (o.use_true_label && data->y_new) opts.true_label = data->y_new;

    const scp::PredictionReport report = scp::predict(data->data, *data->x_new, opts);
    auto* r = new scp_report{scp::make_report_document(report, opts, o.seed)};
    r->doc.query_row = data->query_row;
    *out = r;
  });
}

size_t scp_report_interval_count(const scp_report* r) { return r ? r->doc.intervals.size() : 0; }

scp_status scp_report_interval(const scp_report* r, size_t i, double* lo, double* hi) {
  return guarded([&] {
    require(r && lo && hi, "report_interval", "null argument");
    require(i < r->doc.intervals.size(), "report_interval", "interval index out of range");
    *lo = r->doc.intervals[i].lo;
    *hi = r->doc.intervals[i].hi;
  });
}

double scp_report_length(const scp_report* r) { return r ? r->doc.lebesgue_length : 0.0; }
double scp_report_selected_lambda(const scp_report* r) { return r ? r->doc.selected_lambda : 0.0; }
size_t scp_report_selected_step(const scp_report* r) { return r ? r->doc.selected_step_index : 0; }

scp_status scp_report_to_json(const scp_report* r, char** json) {
  return guarded([&] {
    require(r && json, "report_to_json", "null argument");
    *json = duplicate(scp::dump_json(scp::to_json(r->doc)));
  });
}

void scp_report_free(scp_report* r) { delete r; }

scp_status scp_simulate(const scp_simulate_options* options, scp_experiment** out) {
  return guarded([&] {
    require(out, "simulate", "null argument");
    scp_simulate_options o;
    scp_simulate_options_default(&o);
    if (options) o = *options;
    scp::ExperimentConfig config;
    config.example = scp::make_example(o.example, o.n, o.sigma);
    config.epsilon = o.epsilon;
    config.variant.kind = variant_of(o.variant);
    config.variant.penalty_weight = o.penalty_weight;
    config.rule.kind = rule_of(o.rule);
    config.rule.early_stop_factor = o.early_stop_factor;
    config.rule.neighbors = o.neighbors;
    config.reps = o.reps;
    config.seed = o.seed;
    config.standardize = o.standardize != 0;
    config.threads = threads_of(o.threads);
    config.keep_traces = o.keep_traces != 0;
    *out = new scp_experiment{scp::validity_experiment(config)};
  });
}

double scp_experiment_validity(const scp_experiment* e) { return e ? e->result.validity_freq : 0.0; }

scp_status scp_experiment_to_json(const scp_experiment* e, char** json) {
  return guarded([&] {
    require(e && json, "experiment_to_json", "null argument");
    *json = duplicate(scp::dump_json(scp::to_json(e->result)));
  });
}

scp_status scp_experiment_traces_csv(const scp_experiment* e, char** csv) {
  return guarded([&] {
    require(e && csv, "experiment_traces_csv", "null argument");
    *csv = duplicate(scp::traces_csv(e->result));
  });
}

void scp_experiment_free(scp_experiment* e) { delete e; }

scp_status scp_write_file_atomic(const char* path, const char* content) {
  return guarded([&] {
    require(path && content, "write_output", "null argument");
    scp::write_file_atomic(path, content);
  });
}

}  // extern "C"
