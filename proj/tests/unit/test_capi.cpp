#include <doctest.h>

#include <cstring>
#include <string>

#include <json.hpp>

#include "scp/scp.h"

TEST_CASE("C API path on the one-variable toy") {
  const double X[] = {1, 2, 3};
  const double y[] = {2, 4, 6};
  scp_dataset* data = nullptr;
  REQUIRE(scp_dataset_from_arrays(X, y, 3, 1, nullptr, &data) == SCP_OK);
  CHECK(scp_dataset_rows(data) == 3);
  CHECK(scp_dataset_has_query(data) == 0);
  scp_path* path = nullptr;
  REQUIRE(scp_path_compute(data, SCP_PENALTY_NONE, 0.0, &path) == SCP_OK);
  CHECK(scp_path_step_count(path) == 1);
  CHECK(scp_path_lambda(path, 0) == doctest::Approx(56.0));
  char* text = nullptr;
  REQUIRE(scp_path_to_json(path, &text) == SCP_OK);
  const auto j = nlohmann::json::parse(text);
  CHECK(j["steps"].size() == 1);
  scp_string_free(text);
  scp_path_free(path);

  scp_report* report = nullptr;
  CHECK(scp_predict(data, nullptr, &report) == SCP_ERR_USAGE);
  CHECK(std::string(scp_last_error()).find("predict") == 0);
  scp_dataset_free(data);
}

TEST_CASE("C API prediction") {
  const double X[] = {1, 0, 0, 1, 1, 1, 2, 1, 1, 2, 3, 1, 0.5, 0.2, 2, 2};
  const double y[] = {1.1, 0.9, 2.2, 3.1, 2.9, 4.2, 0.8, 4.1};
  const double q[] = {1.5, 1.5};
  scp_dataset* data = nullptr;
  REQUIRE(scp_dataset_from_arrays(X, y, 8, 2, q, &data) == SCP_OK);
  scp_predict_options opts;
  scp_predict_options_default(&opts);
  opts.epsilon = 0.3;
  opts.threads = 1;
  scp_report* report = nullptr;
  REQUIRE(scp_predict(data, &opts, &report) == SCP_OK);
  CHECK(scp_report_interval_count(report) >= 1);
  double lo = 0, hi = 0;
  CHECK(scp_report_interval(report, 0, &lo, &hi) == SCP_OK);
  CHECK(lo <= hi);
  CHECK(scp_report_interval(report, 99, &lo, &hi) == SCP_ERR_USAGE);
  CHECK(scp_report_selected_step(report) >= 1);
  char* text = nullptr;
  REQUIRE(scp_report_to_json(report, &text) == SCP_OK);
  CHECK(nlohmann::json::parse(text)["epsilon"].get<double>() == 0.3);
  scp_string_free(text);
  scp_report_free(report);

  opts.variant = 17;
  CHECK(scp_predict(data, &opts, &report) == SCP_ERR_USAGE);
  opts.variant = SCP_VARIANT_COLP;
  opts.epsilon = 2.0;
  CHECK(scp_predict(data, &opts, &report) == SCP_ERR_USAGE);
  CHECK(std::string(scp_last_error_kind()) == "InvalidArgument");
  scp_dataset_free(data);
}

TEST_CASE("C API error classes") {
  scp_dataset* data = nullptr;
  CHECK(scp_dataset_from_csv("/nonexistent.csv", nullptr, &data) == SCP_ERR_DATA);
  CHECK(std::string(scp_last_error_kind()) == "Io");
  const double X[] = {1, 1, 0};
  const double y[] = {1, -1, 0};
  REQUIRE(scp_dataset_from_arrays(X, y, 3, 1, nullptr, &data) == SCP_OK);
  scp_path* path = nullptr;
  CHECK(scp_path_compute(data, SCP_PENALTY_NONE, 0.0, &path) == SCP_ERR_NUMERICAL);
  CHECK(scp_path_compute(data, SCP_PENALTY_IDENTITY, -1.0, &path) == SCP_ERR_USAGE);
  scp_dataset_free(data);
  int v = -1;
  CHECK(scp_parse_variant("corlap", &v) == SCP_OK);
  CHECK(v == SCP_VARIANT_CORLAP);
  CHECK(scp_parse_rule("bogus", &v) == SCP_ERR_USAGE);
  CHECK(std::strlen(scp_version()) > 0);
}

TEST_CASE("C API simulation") {
  scp_simulate_options opts;
  scp_simulate_options_default(&opts);
  opts.n = 30;
  opts.reps = 3;
  opts.threads = 1;
  opts.keep_traces = 1;
  scp_experiment* e = nullptr;
  REQUIRE(scp_simulate(&opts, &e) == SCP_OK);
  CHECK(scp_experiment_validity(e) >= 0.0);
  char* text = nullptr;
  REQUIRE(scp_experiment_traces_csv(e, &text) == SCP_OK);
  CHECK(std::string(text).rfind("rep,step", 0) == 0);
  scp_string_free(text);
  scp_experiment_free(e);
  opts.example = 'z';
  CHECK(scp_simulate(&opts, &e) == SCP_ERR_USAGE);
}
