/*
 * Copyright 2026 The SuperICL Harness Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface to the SuperICL harness.
 *
 * Objects are opaque handles created and destroyed by the library. Every
 * fallible call returns a sicl_status; on failure the calling thread's last
 * error message and error name are available until its next library call.
 * Strings returned through char** must be released with sicl_string_free.
 */

#ifndef SUPERICL_SUPERICL_H
#define SUPERICL_SUPERICL_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SUPERICL_BUILDING)
#    define SICL_API __declspec(dllexport)
#  else
#    define SICL_API __declspec(dllimport)
#  endif
#else
#  define SICL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values double as CLI exit codes. */
typedef enum sicl_status {
  SICL_OK = 0,
  SICL_ERR_CONFIG = 1,
  SICL_ERR_DATA = 2,
  SICL_ERR_PROVIDER = 3,
  SICL_ERR_IO = 4,
  SICL_ERR_INVALID_ARGUMENT = 5,
  SICL_ERR_INTERNAL = 6
} sicl_status;

typedef struct sicl_config sicl_config;
typedef struct sicl_result sicl_result;

enum { SICL_FLAG_DUMP_PROMPTS = 1 };

SICL_API const char* sicl_version(void);

/* Message and error name (e.g. "UnknownLabel") of this thread's last failure. */
SICL_API const char* sicl_last_error(void);
SICL_API const char* sicl_last_error_name(void);

SICL_API void sicl_string_free(char* s);

/* ---- configuration ---------------------------------------------------- */

SICL_API sicl_status sicl_config_load(const char* path, sicl_config** out);
/* Relative paths inside json_text resolve against base_dir (may be NULL for cwd). */
SICL_API sicl_status sicl_config_parse(const char* json_text, const char* base_dir,
                                       sicl_config** out);
SICL_API void sicl_config_free(sicl_config* cfg);

/*
 * Overrides one field. Keys: "seed", "k" (num_examples), "mode"
 * (supericl|icl|plugin_only), "backend" (http|gold_oracle|echo_plugin_oracle|
 * threshold_oracle), "cache_dir", "out" (output_dir), "token_budget",
 * "parallelism", "bin_width", "explanations" (0|1).
 */
SICL_API sicl_status sicl_config_set(sicl_config* cfg, const char* key, const char* value);
SICL_API sicl_status sicl_config_to_json(const sicl_config* cfg, char** out_json);
/* Output directory from the config, or "" when unset. Owned by cfg. */
SICL_API const char* sicl_config_output_dir(const sicl_config* cfg);

/* ---- experiments ------------------------------------------------------ */

/*
 * On a run failure the status is non-zero and *out still receives the partial
 * result (possibly with no records) marked as failed so it can be emitted.
 */
SICL_API sicl_status sicl_run(const sicl_config* cfg, int flags, sicl_result** out);
/* seeds == NULL uses the config's seed list. */
SICL_API sicl_status sicl_run_multi_seed(const sicl_config* cfg, const uint64_t* seeds,
                                         size_t n_seeds, int flags, sicl_result** out);
/* ks == NULL uses the config's sweep list. */
SICL_API sicl_status sicl_sweep_k(const sicl_config* cfg, const size_t* ks, size_t n_ks,
                                  int flags, sicl_result** out);
SICL_API sicl_status sicl_run_ablation(const sicl_config* cfg, int flags, sicl_result** out);

/* Reads a previously emitted single-run directory (report.json). */
SICL_API sicl_status sicl_report_load(const char* run_dir, sicl_result** out);

SICL_API sicl_status sicl_result_emit(const sicl_result* res, const char* out_dir, int overwrite);
/* {"kind", "rows": [{name, n, accuracy, mcc, pct_overridden, ...}], "variance"} */
SICL_API sicl_status sicl_result_summary_json(const sicl_result* res, char** out_json);
/* The full EvalReport JSON of one row. */
SICL_API sicl_status sicl_result_report_json(const sicl_result* res, size_t row, char** out_json);
SICL_API size_t sicl_result_row_count(const sicl_result* res);
SICL_API double sicl_result_accuracy(const sicl_result* res, size_t row);
SICL_API int sicl_result_failed(const sicl_result* res);
/* Multi-seed variance in squared percentage points; returns 0 if absent. */
SICL_API int sicl_result_variance(const sicl_result* res, double* out);
/* Replaces every row's histogram using a new bin width. */
SICL_API sicl_status sicl_result_rebin(sicl_result* res, double bin_width);
SICL_API void sicl_result_free(sicl_result* res);

/* ---- standalone helpers ----------------------------------------------- */

/* *out_label is NULL when the completion is Unparseable. */
SICL_API sicl_status sicl_parse_label(const char* completion, const char* const* labels,
                                      size_t n_labels, char** out_label);
SICL_API sicl_status sicl_variance(const double* values, size_t n, double* out);
SICL_API sicl_status sicl_format_confidence(double confidence, int decimals, char** out);

#ifdef __cplusplus
}
#endif

#endif /* SUPERICL_SUPERICL_H */
