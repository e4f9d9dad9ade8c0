#include <cstdio>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "scp/scp.h"

namespace {

// Owned C string from the library.
struct Text {
  char* data = nullptr;
  ~Text() { scp_string_free(data); }
};

int fail(scp_status status, const char* stage) {
  std::string message = scp_last_error();
  if (message.empty()) message = "unknown failure";
  std::cerr << "scp " << stage << ": " << message << "\n";
  return status == SCP_ERR_INTERNAL ? SCP_ERR_NUMERICAL : static_cast<int>(status);
}

int usage(const std::string& message) {
  std::cerr << "scp: " << message << "\n";
  return SCP_ERR_USAGE;
}

int emit(const std::string& out, const char* content) {
  if (out.empty() || out == "-") {
    std::fputs(content, stdout);
    return std::fflush(stdout) == 0 ? 0 : fail(SCP_ERR_DATA, "write_output");
  }
  if (const scp_status s = scp_write_file_atomic(out.c_str(), content)) return fail(s, "write_output");
  return 0;
}

struct PredictArgs {
  std::string data, out, variant = "colp", rule = "smallest", query = "last", response;
  double epsilon = 0.1, mu = 1.0, early_stop_factor = 10.0;
  double ridge_weight = -1.0;
  int neighbors = 2, threads = 0;
  std::size_t query_index = 0;
  bool standardize = false, halve_penalty_offset = false;
  std::uint64_t seed = 0;
};

struct SimulateArgs {
  std::string example = "a", out, traces, variant = "colp", rule = "smallest";
  int n = 300, reps = 100, neighbors = 2, threads = 0;
  double sigma = 1.0, epsilon = 0.1, mu = 1.0, early_stop_factor = 10.0;
  bool standardize = false;
  std::uint64_t seed = 1;
};

struct PathArgs {
  std::string data, out, response, penalty = "none";
  double mu = 0.0;
};

int run_predict(const PredictArgs& a) {
  scp_csv_options csv;
  scp_csv_options_default(&csv);
  const std::map<std::string, int> policies{{"last", SCP_QUERY_LAST_ROW_UNLABELED},
                                            {"index", SCP_QUERY_HELD_OUT_INDEX},
                                            {"random", SCP_QUERY_RANDOM_WITH_SEED}};
  csv.policy = policies.at(a.query);
  csv.index = a.query_index;
  csv.seed = a.seed;
  csv.response = a.response.c_str();
  if (csv.policy == SCP_QUERY_HELD_OUT_INDEX && a.query_index == 0) {
    return usage("predict: --query index requires --query-index K");
  }

  scp_predict_options opts;
  scp_predict_options_default(&opts);
  if (const scp_status s = scp_parse_variant(a.variant.c_str(), &opts.variant)) return fail(s, "options");
  if (const scp_status s = scp_parse_rule(a.rule.c_str(), &opts.rule)) return fail(s, "options");
  opts.epsilon = a.epsilon;
  opts.penalty_weight = a.mu;
  opts.early_stop_factor = a.early_stop_factor;
  opts.neighbors = a.neighbors;
  opts.standardize = a.standardize ? 1 : 0;
  opts.halve_penalty_offset = a.halve_penalty_offset ? 1 : 0;
  opts.threads = a.threads;
  opts.seed = a.seed;
  if (a.ridge_weight >= 0.0) {
    opts.has_ridge_weight = 1;
    opts.ridge_weight = a.ridge_weight;
  }

  scp_dataset* data = nullptr;
  if (const scp_status s = scp_dataset_from_csv(a.data.c_str(), &csv, &data)) return fail(s, "read_data");
  scp_report* report = nullptr;
  const scp_status s = scp_predict(data, &opts, &report);
  scp_dataset_free(data);
  if (s) return fail(s, "predict");
  Text json;
  const scp_status js = scp_report_to_json(report, &json.data);
  scp_report_free(report);
  if (js) return fail(js, "serialize");
  return emit(a.out, json.data);
}

int run_simulate(const SimulateArgs& a) {
  scp_simulate_options opts;
  scp_simulate_options_default(&opts);
  if (a.example.size() != 1) return usage("simulate: --example must be one of a, b, c, d");
  opts.example = a.example[0];
  if (const scp_status s = scp_parse_variant(a.variant.c_str(), &opts.variant)) return fail(s, "options");
  if (const scp_status s = scp_parse_rule(a.rule.c_str(), &opts.rule)) return fail(s, "options");
  opts.n = a.n;
  opts.sigma = a.sigma;
  opts.reps = a.reps;
  opts.epsilon = a.epsilon;
  opts.penalty_weight = a.mu;
  opts.early_stop_factor = a.early_stop_factor;
  opts.neighbors = a.neighbors;
  opts.standardize = a.standardize ? 1 : 0;
  opts.threads = a.threads;
  opts.keep_traces = a.traces.empty() ? 0 : 1;
  opts.seed = a.seed;

  scp_experiment* experiment = nullptr;
  if (const scp_status s = scp_simulate(&opts, &experiment)) return fail(s, "simulate");
  Text json, csv;
  scp_status s = scp_experiment_to_json(experiment, &json.data);
  if (!s && !a.traces.empty()) s = scp_experiment_traces_csv(experiment, &csv.data);
  scp_experiment_free(experiment);
  if (s) return fail(s, "serialize");
  if (!a.traces.empty()) {
    if (const scp_status w = scp_write_file_atomic(a.traces.c_str(), csv.data)) return fail(w, "write_traces");
  }
  return emit(a.out, json.data);
}

int run_path(const PathArgs& a) {
  const std::map<std::string, int> penalties{
      {"none", SCP_PENALTY_NONE}, {"identity", SCP_PENALTY_IDENTITY}, {"fused", SCP_PENALTY_FUSED}};
  scp_dataset* data = nullptr;
  if (const scp_status s = scp_dataset_from_labeled_csv(a.data.c_str(), a.response.c_str(), &data)) {
    return fail(s, "read_data");
  }
  scp_path* path = nullptr;
  const scp_status s = scp_path_compute(data, penalties.at(a.penalty), a.mu, &path);
  scp_dataset_free(data);
  if (s) return fail(s, "path");
  Text json;
  const scp_status js = scp_path_to_json(path, &json.data);
  scp_path_free(path);
  if (js) return fail(js, "serialize");
  return emit(a.out, json.data);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse conformal predictors for the LASSO and its relatives"};
  app.set_version_flag("--version", scp_version());
  app.require_subcommand(1);

  const std::vector<std::string> variants{"colp", "corp", "corlap", "cenep", "cosmolap"};
  const std::vector<std::string> rules{"smallest", "early-stop", "n-pn"};

  PredictArgs pa;
  auto* predict = app.add_subcommand("predict", "Conformal prediction set for one query row");
  predict->add_option("--data", pa.data, "CSV with header")->required();
  predict->add_option("--out", pa.out, "Output JSON file (stdout when omitted)");
  predict->add_option("--epsilon", pa.epsilon, "Miscoverage level in (0, 1)")->capture_default_str();
  predict->add_option("--variant", pa.variant)->check(CLI::IsMember(variants))->capture_default_str();
  predict->add_option("--rule", pa.rule)->check(CLI::IsMember(rules))->capture_default_str();
  predict->add_option("--mu", pa.mu, "Quadratic penalty weight for cenep/cosmolap")->capture_default_str();
  predict->add_option("--ridge-weight", pa.ridge_weight, "Fixed ridge weight for corp/corlap (default lambda_k)");
  predict->add_flag("--halve-penalty-offset", pa.halve_penalty_offset, "Use lambda_k/2 in the cenep/cosmolap offset");
  predict->add_option("--neighbors", pa.neighbors, "N for the n-pn rule")->check(CLI::PositiveNumber)->capture_default_str();
  predict->add_option("--early-stop-factor", pa.early_stop_factor)->capture_default_str();
  predict->add_flag("--standardize", pa.standardize, "Standardize columns on the labeled rows");
  predict->add_option("--seed", pa.seed, "Seed for --query random; recorded in the report")->capture_default_str();
  predict->add_option("--query", pa.query, "Query row policy")
      ->check(CLI::IsMember({"last", "index", "random"}))
      ->capture_default_str();
  predict->add_option("--query-index", pa.query_index, "1-based data row used as the query");
  predict->add_option("--response", pa.response, "Response column name or 1-based number (default last)");
  predict->add_option("--threads", pa.threads, "Worker threads (default SCP_THREADS or all cores)");

  SimulateArgs sa;
  auto* simulate = app.add_subcommand("simulate", "Replicated validity experiment on a synthetic design");
  simulate->add_option("--example", sa.example)->check(CLI::IsMember({"a", "b", "c", "d"}))->capture_default_str();
  simulate->add_option("--n", sa.n, "Sample size including the query")->capture_default_str();
  simulate->add_option("--sigma", sa.sigma)->capture_default_str();
  simulate->add_option("--reps", sa.reps)->capture_default_str();
  simulate->add_option("--epsilon", sa.epsilon)->capture_default_str();
  simulate->add_option("--variant", sa.variant)->check(CLI::IsMember(variants))->capture_default_str();
  simulate->add_option("--rule", sa.rule)->check(CLI::IsMember(rules))->capture_default_str();
  simulate->add_option("--mu", sa.mu)->capture_default_str();
  simulate->add_option("--neighbors", sa.neighbors)->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--early-stop-factor", sa.early_stop_factor)->capture_default_str();
  simulate->add_flag("--standardize", sa.standardize);
  simulate->add_option("--seed", sa.seed)->capture_default_str();
  simulate->add_option("--threads", sa.threads, "Worker threads (default SCP_THREADS or all cores)");
  simulate->add_option("--out", sa.out, "Output JSON file (stdout when omitted)");
  simulate->add_option("--traces", sa.traces, "Also write per-step length traces as CSV");

  PathArgs ha;
  auto* path = app.add_subcommand("path", "Regularization path of a fully labeled CSV");
  path->add_option("--data", ha.data)->required();
  path->add_option("--out", ha.out, "Output JSON file (stdout when omitted)");
  path->add_option("--response", ha.response, "Response column name or 1-based number (default last)");
  path->add_option("--penalty", ha.penalty)->check(CLI::IsMember({"none", "identity", "fused"}))->capture_default_str();
  path->add_option("--mu", ha.mu, "Quadratic penalty weight")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return SCP_ERR_USAGE;
  }

  if (*predict) return run_predict(pa);
  if (*simulate) return run_simulate(sa);
  return run_path(ha);
}
