#ifndef SCP_SCP_H
#define SCP_SCP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SCP_BUILDING_LIBRARY)
#    define SCP_API __declspec(dllexport)
#  else
#    define SCP_API __declspec(dllimport)
#  endif
#else
#  define SCP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as CLI exit codes. */
typedef enum scp_status {
  SCP_OK = 0,
  SCP_ERR_USAGE = 1,
  SCP_ERR_DATA = 2,
  SCP_ERR_NUMERICAL = 3,
  SCP_ERR_INTERNAL = 4
} scp_status;

typedef enum scp_variant {
  SCP_VARIANT_COLP = 0,
  SCP_VARIANT_CORP = 1,
  SCP_VARIANT_CORLAP = 2,
  SCP_VARIANT_CENEP = 3,
  SCP_VARIANT_COSMOLAP = 4
} scp_variant;

typedef enum scp_rule {
  SCP_RULE_SMALLEST = 0,
  SCP_RULE_EARLY_STOP = 1,
  SCP_RULE_N_PREVIOUS_NEIGHBORS = 2
} scp_rule;

typedef enum scp_query_policy {
  SCP_QUERY_LAST_ROW_UNLABELED = 0,
  SCP_QUERY_HELD_OUT_INDEX = 1,
  SCP_QUERY_RANDOM_WITH_SEED = 2
} scp_query_policy;

typedef enum scp_penalty {
  SCP_PENALTY_NONE = 0,
  SCP_PENALTY_IDENTITY = 1,
  SCP_PENALTY_FUSED = 2
} scp_penalty;

typedef struct scp_dataset scp_dataset;
typedef struct scp_path scp_path;
typedef struct scp_report scp_report;
typedef struct scp_experiment scp_experiment;

typedef struct scp_csv_options {
  int policy;             /* scp_query_policy */
  size_t index;           /* 1-based, SCP_QUERY_HELD_OUT_INDEX only */
  uint64_t seed;          /* SCP_QUERY_RANDOM_WITH_SEED only */
  const char* response;   /* header name or 1-based column; NULL or "" = last */
} scp_csv_options;

typedef struct scp_predict_options {
  double epsilon;
  int variant;            /* scp_variant */
  int rule;               /* scp_rule */
  double penalty_weight;  /* mu for CENeP / CoSmoLaP */
  int has_ridge_weight;   /* 0: ridge weight follows lambda_k */
  double ridge_weight;
  int halve_penalty_offset;
  double early_stop_factor;
  int neighbors;
  int standardize;
  int threads;            /* <= 0: SCP_THREADS or hardware concurrency */
  int use_true_label;     /* score the query's retained label when present */
  uint64_t seed;          /* recorded in the report */
} scp_predict_options;

typedef struct scp_simulate_options {
  char example;           /* 'a' .. 'd' */
  int n;                  /* includes the query row */
  double sigma;
  int reps;
  double epsilon;
  int variant;
  int rule;
  double penalty_weight;
  double early_stop_factor;
  int neighbors;
  int standardize;
  int threads;
  int keep_traces;
  uint64_t seed;
} scp_simulate_options;

SCP_API const char* scp_version(void);

/* Message of the last failure on the calling thread; "" after success. */
SCP_API const char* scp_last_error(void);
/* Name of the last failure's error kind, e.g. "ParseError". */
SCP_API const char* scp_last_error_kind(void);

/* Strings returned through char** are owned by the caller. */
SCP_API void scp_string_free(char* s);

SCP_API void scp_csv_options_default(scp_csv_options* options);
SCP_API void scp_predict_options_default(scp_predict_options* options);
SCP_API void scp_simulate_options_default(scp_simulate_options* options);

SCP_API scp_status scp_parse_variant(const char* name, int* variant);
SCP_API scp_status scp_parse_rule(const char* name, int* rule);

/* Labeled rows plus one query row. */
SCP_API scp_status scp_dataset_from_csv(const char* path, const scp_csv_options* options, scp_dataset** out);
/* Every row labeled; no query. */
SCP_API scp_status scp_dataset_from_labeled_csv(const char* path, const char* response, scp_dataset** out);
/* Row-major X (n x p); x_new may be NULL. */
SCP_API scp_status scp_dataset_from_arrays(const double* X, const double* y, size_t n, size_t p,
                                           const double* x_new, scp_dataset** out);
SCP_API size_t scp_dataset_rows(const scp_dataset* data);
SCP_API size_t scp_dataset_cols(const scp_dataset* data);
SCP_API int scp_dataset_has_query(const scp_dataset* data);
/* Returns 1 and writes the label when the query row carried one. */
SCP_API int scp_dataset_query_label(const scp_dataset* data, double* label);
SCP_API void scp_dataset_free(scp_dataset* data);

SCP_API scp_status scp_path_compute(const scp_dataset* data, int penalty, double mu, scp_path** out);
SCP_API size_t scp_path_step_count(const scp_path* path);
SCP_API double scp_path_lambda(const scp_path* path, size_t step);
SCP_API scp_status scp_path_to_json(const scp_path* path, char** json);
SCP_API void scp_path_free(scp_path* path);

SCP_API scp_status scp_predict(const scp_dataset* data, const scp_predict_options* options, scp_report** out);
SCP_API size_t scp_report_interval_count(const scp_report* report);
SCP_API scp_status scp_report_interval(const scp_report* report, size_t i, double* lo, double* hi);
SCP_API double scp_report_length(const scp_report* report);
SCP_API double scp_report_selected_lambda(const scp_report* report);
/* 1-based */
SCP_API size_t scp_report_selected_step(const scp_report* report);
SCP_API scp_status scp_report_to_json(const scp_report* report, char** json);
SCP_API void scp_report_free(scp_report* report);

SCP_API scp_status scp_simulate(const scp_simulate_options* options, scp_experiment** out);
SCP_API double scp_experiment_validity(const scp_experiment* experiment);
SCP_API scp_status scp_experiment_to_json(const scp_experiment* experiment, char** json);
SCP_API scp_status scp_experiment_traces_csv(const scp_experiment* experiment, char** csv);
SCP_API void scp_experiment_free(scp_experiment* experiment);

/* Temporary file plus rename. */
SCP_API scp_status scp_write_file_atomic(const char* path, const char* content);

#ifdef __cplusplus
}
#endif

#endif
