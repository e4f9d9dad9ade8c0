#include "report_json.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "error.hpp"
#include "version.hpp"

namespace scp {

using nlohmann::json;

namespace {

void write_string(std::ostringstream& out, const std::string& s) {
  // reuse the library escaper for strings
  out << json(s).dump();
}

void write_value(std::ostringstream& out, const json& value, int indent, int depth) {
  const std::string pad = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  switch (value.type()) {
    case json::value_t::object: {
      if (value.empty()) {
        out << "{}";
        return;
      }
      out << '{';
      bool first = true;
      for (auto it = value.begin(); it != value.end(); ++it) {
        if (!first) out << ',';
        first = false;
        out << pad;
        write_string(out, it.key());
        out << (indent > 0 ? ": " : ":");
        write_value(out, it.value(), indent, depth + 1);
      }
      out << close << '}';
      return;
    }
    case json::value_t::array: {
      if (value.empty()) {
        out << "[]";
        return;
      }
      // scalar arrays stay on one line
      bool flat = true;
      for (const auto& v : value) flat = flat && !v.is_structured();
      out << '[';
      bool first = true;
      for (const auto& v : value) {
        if (!first) out << (flat && indent > 0 ? ", " : ",");
        first = false;
        if (!flat) out << pad;
        write_value(out, v, indent, depth + 1);
      }
      if (!flat) out << close;
      out << ']';
      return;
    }
    case json::value_t::number_float: {
      const double d = value.get<double>();
      if (!std::isfinite(d)) {
        out << "null";
        return;
      }
      char buffer[32];
      std::snprintf(buffer, sizeof buffer, "%.17g", d);
      std::string text = buffer;
      // keep the float type visible on round trip
      if (text.find_first_of(".eE") == std::string::npos) text += ".0";
      out << text;
      return;
    }
    default:
      out << value.dump();
  }
}

json intervals_json(const std::vector<Interval>& intervals) {
  json arr = json::array();
  for (const Interval& iv : intervals) arr.push_back(json::array({encode_real(iv.lo), encode_real(iv.hi)}));
  return arr;
}

std::vector<int> one_based(const std::vector<int>& indices) {
  std::vector<int> out;
  out.reserve(indices.size());
  for (int j : indices) out.push_back(j + 1);
  return out;
}

}  // namespace

std::string dump_json(const json& value, int indent) {
  std::ostringstream out;
  write_value(out, value, indent, 0);
  out << '\n';
  return out.str();
}

json encode_real(double value) {
  if (std::isnan(value)) return nullptr;
  if (value == kInfinity) return "inf";
  if (value == -kInfinity) return "-inf";
  return value;
}

double decode_real(const json& value) {
  if (value.is_null()) return std::nan("");
  if (value.is_string()) {
    const auto s = value.get<std::string>();
    if (s == "inf") return kInfinity;
    if (s == "-inf") return -kInfinity;
    throw Error(ErrorKind::ParseError, "decode_real", "unexpected string '" + s + "' for a number");
  }
  if (!value.is_number()) throw Error(ErrorKind::ParseError, "decode_real", "expected a number");
  return value.get<double>();
}

PredictionReportDocument make_report_document(const PredictionReport& report, const PredictOptions& options,
                                              std::uint64_t seed) {
  PredictionReportDocument doc;
  doc.epsilon = options.epsilon;
  doc.variant = to_string(options.variant.kind);
  doc.rule = to_string(options.rule.kind);
  doc.penalty_weight = options.variant.penalty_weight;
  doc.ridge_weight = options.variant.ridge_weight;
  doc.neighbors = options.rule.neighbors;
  doc.early_stop_factor = options.rule.early_stop_factor;
  doc.standardize = options.standardize;
  doc.selected_lambda = report.selected_lambda;
  doc.selected_step_index = report.selected_index + 1;
  doc.active_variables = one_based(report.active_variables);
  doc.intervals = report.final_set.intervals();
  doc.lebesgue_length = report.length;
  for (std::size_t k = 0; k < report.lambdas.size(); ++k) {
    doc.per_step.push_back(StepSummary{report.lambdas[k], report.lengths[k], report.stopped[k]});
  }
  if (report.early_stop_at) doc.early_stop_index = *report.early_stop_at + 1;
  doc.beyond_early_stop = report.beyond_early_stop;
  doc.true_label = options.true_label;
  doc.covered = report.covered;
  doc.warnings = report.warnings;
  doc.seed = seed;
  doc.software_version = kSoftwareVersion;
  return doc;
}

json to_json(const PredictionReportDocument& doc) {
  json j;
  j["epsilon"] = doc.epsilon;
  j["variant"] = doc.variant;
  j["rule"] = doc.rule;
  j["penalty_weight"] = doc.penalty_weight;
  j["ridge_weight"] = doc.ridge_weight ? encode_real(*doc.ridge_weight) : json("lambda_k");
  j["neighbors"] = doc.neighbors;
  j["early_stop_factor"] = doc.early_stop_factor;
  j["standardize"] = doc.standardize;
  j["selected_lambda"] = encode_real(doc.selected_lambda);
  j["selected_step_index"] = doc.selected_step_index;
  j["active_variables"] = doc.active_variables;
  j["intervals"] = intervals_json(doc.intervals);
  j["lebesgue_length"] = encode_real(doc.lebesgue_length);
  json steps = json::array();
  for (const StepSummary& s : doc.per_step) {
    steps.push_back({{"lambda", encode_real(s.lambda)}, {"length", encode_real(s.length)}, {"stopped", s.stopped}});
  }
  j["per_step"] = steps;
  j["early_stop_index"] = doc.early_stop_index ? json(*doc.early_stop_index) : json(nullptr);
  j["beyond_early_stop"] = doc.beyond_early_stop;
  j["query_row"] = doc.query_row ? json(*doc.query_row) : json(nullptr);
  j["true_label"] = doc.true_label ? encode_real(*doc.true_label) : json(nullptr);
  j["covered"] = doc.covered ? json(*doc.covered) : json(nullptr);
  j["warnings"] = doc.warnings;
  j["seed"] = doc.seed;
  j["software_version"] = doc.software_version;
  return j;
}

PredictionReportDocument report_from_json(const json& j) {
  try {
    PredictionReportDocument doc;
    doc.epsilon = decode_real(j.at("epsilon"));
    doc.variant = j.at("variant").get<std::string>();
    doc.rule = j.at("rule").get<std::string>();
    doc.penalty_weight = decode_real(j.at("penalty_weight"));
    const json& ridge = j.at("ridge_weight");
    if (!(ridge.is_string() && ridge.get<std::string>() == "lambda_k")) doc.ridge_weight = decode_real(ridge);
    doc.neighbors = j.at("neighbors").get<int>();
    doc.early_stop_factor = decode_real(j.at("early_stop_factor"));
    doc.standardize = j.at("standardize").get<bool>();
    doc.selected_lambda = decode_real(j.at("selected_lambda"));
    doc.selected_step_index = j.at("selected_step_index").get<std::size_t>();
    doc.active_variables = j.at("active_variables").get<std::vector<int>>();
    for (const auto& iv : j.at("intervals")) {
      doc.intervals.push_back(Interval{decode_real(iv.at(0)), decode_real(iv.at(1))});
    }
    doc.lebesgue_length = decode_real(j.at("lebesgue_length"));
    for (const auto& s : j.at("per_step")) {
      doc.per_step.push_back(
          StepSummary{decode_real(s.at("lambda")), decode_real(s.at("length")), s.at("stopped").get<bool>()});
    }
    if (!j.at("early_stop_index").is_null()) doc.early_stop_index = j.at("early_stop_index").get<std::size_t>();
    doc.beyond_early_stop = j.at("beyond_early_stop").get<bool>();
    if (!j.at("query_row").is_null()) doc.query_row = j.at("query_row").get<std::size_t>();
    if (!j.at("true_label").is_null()) doc.true_label = decode_real(j.at("true_label"));
    if (!j.at("covered").is_null()) doc.covered = j.at("covered").get<bool>();
    doc.warnings = j.at("warnings").get<std::vector<std::string>>();
    doc.seed = j.at("seed").get<std::uint64_t>();
    doc.software_version = j.at("software_version").get<std::string>();
    return doc;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, "report_from_json", e.what());
  }
}

json to_json(const ExperimentResult& r) {
  json j;
  j["example"] = std::string(1, r.example);
  j["n"] = r.n;
  j["sigma"] = r.sigma;
  j["epsilon"] = r.epsilon;
  j["variant"] = r.variant;
  j["rule"] = r.rule;
  j["seed"] = r.seed;
  j["reps"] = r.reps;
  j["completed_reps"] = r.completed_reps;
  j["failed_reps"] = r.failed_reps;
  j["covered_reps"] = r.covered_reps;
  j["unbounded_reps"] = r.unbounded_reps;
  j["validity_freq"] = r.validity_freq;
  j["ci_half_width"] = r.ci_half_width;
  j["median_length"] = encode_real(r.median_length);
  j["mean_length_finite"] = encode_real(r.mean_length_finite);
  json freq = json::array();
  for (double f : r.selection.frequency) freq.push_back(f);
  j["selection"] = {{"frequency", freq}, {"precision", r.selection.precision}, {"recall", r.selection.recall}};
  json ratios = json::array();
  for (double v : r.length_ratios) ratios.push_back(encode_real(v));
  j["length_ratios"] = ratios;
  json lambdas = json::array();
  for (double v : r.selected_lambdas) lambdas.push_back(encode_real(v));
  j["selected_lambdas"] = lambdas;
  j["errors"] = r.errors;
  j["software_version"] = kSoftwareVersion;
  return j;
}

json to_json(const SolutionPath& path, const Dataset& data) {
  json j;
  j["n"] = data.rows();
  j["p"] = data.cols();
  json steps = json::array();
  for (const PathStep& s : path.steps) {
    json beta = json::array();
    for (Eigen::Index k = 0; k < s.beta.size(); ++k) beta.push_back(s.beta(k));
    steps.push_back({{"lambda", s.lambda}, {"active_set", one_based(s.active_set)}, {"signs", s.signs}, {"beta", beta}});
  }
  j["steps"] = steps;
  j["terminal_lambda"] = path.terminal_lambda;
  j["software_version"] = kSoftwareVersion;
  return j;
}

std::string traces_csv(const ExperimentResult& result) {
  std::ostringstream out;
  out << "rep,step,lambda,length\n";
  char buffer[96];
  for (std::size_t r = 0; r < result.traces.size(); ++r) {
    const StepTrace& t = result.traces[r];
    for (std::size_t k = 0; k < t.lambdas.size(); ++k) {
      std::snprintf(buffer, sizeof buffer, "%zu,%zu,%.17g,%.17g\n", r + 1, k + 1, t.lambdas[k], t.lengths[k]);
      out << buffer;
    }
  }
  return out.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path temp = target;
  temp += ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "write_output", "cannot open '" + temp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw Error(ErrorKind::Io, "write_output", "failed writing '" + temp.string() + "'");
  }
  std::error_code ec;
  fs::rename(temp, target, ec);
  if (ec) {
    fs::remove(temp, ec);
    throw Error(ErrorKind::Io, "write_output", "cannot move output into '" + path + "'");
  }
}

}  // namespace scp
