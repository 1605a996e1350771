// Copyright 2026 The MT-SNN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/* C interface to the MT-SNN library.
 *
 * Every function that can fail returns an mtsnn_status. On failure the
 * thread-local diagnostic from mtsnn_last_error() names the error code and
 * the offending value, e.g. "invalid-config: gamma must lie in [0, 1]".
 * Handles are opaque and owned by the caller; destroy functions accept NULL.
 */

#ifndef MTSNN_MTSNN_H_
#define MTSNN_MTSNN_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MTSNN_API __declspec(dllexport)
#else
#define MTSNN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mtsnn_status {
  MTSNN_OK = 0,
  MTSNN_ERR_VALIDATION = 1,
  MTSNN_ERR_RUNTIME = 2,
  MTSNN_ERR_IO = 3
} mtsnn_status;

typedef enum mtsnn_log_level {
  MTSNN_LOG_DEBUG = 0,
  MTSNN_LOG_INFO = 1,
  MTSNN_LOG_WARN = 2,
  MTSNN_LOG_ERROR = 3
} mtsnn_log_level;

typedef enum mtsnn_source { MTSNN_SOURCE_FILE = 1, MTSNN_SOURCE_FLAG = 2 } mtsnn_source;

enum { MTSNN_SPLIT_TRAIN = 1, MTSNN_SPLIT_TEST = 2 };

typedef struct mtsnn_config mtsnn_config;
typedef struct mtsnn_network mtsnn_network;
typedef struct mtsnn_dataset mtsnn_dataset;

MTSNN_API const char* mtsnn_version(void);
MTSNN_API const char* mtsnn_last_error(void);
/* Short error code of the last failure ("invalid-config", ...). */
MTSNN_API const char* mtsnn_last_error_code(void);

/* Receives every log line. Without a callback (or after passing NULL),
 * lines go to stderr as "<UTC timestamp> level=<level> msg=\"...\"". */
typedef void (*mtsnn_log_fn)(mtsnn_log_level level, const char* message, void* user);
MTSNN_API void mtsnn_set_log_callback(mtsnn_log_fn fn, void* user);
MTSNN_API void mtsnn_set_log_level(mtsnn_log_level min_level);
MTSNN_API void mtsnn_log(mtsnn_log_level level, const char* message);

/* Configuration. Keys are snake_case; mtsnn_config_key_* enumerate them. */
MTSNN_API mtsnn_status mtsnn_config_create(mtsnn_config** out);
MTSNN_API void mtsnn_config_destroy(mtsnn_config* cfg);
MTSNN_API mtsnn_status mtsnn_config_set(mtsnn_config* cfg, const char* key, const char* value,
                                        mtsnn_source source);
MTSNN_API mtsnn_status mtsnn_config_load_file(mtsnn_config* cfg, const char* path);
/* Copies the resolved value ("" when unset) into buf. *needed receives the
 * length including the terminator; buf may be NULL to query it. */
MTSNN_API mtsnn_status mtsnn_config_get(const mtsnn_config* cfg, const char* key, char* buf,
                                        size_t buf_len, size_t* needed);
MTSNN_API mtsnn_status mtsnn_config_validate(const mtsnn_config* cfg);
/* Writes the resolved configuration with provenance and the version. */
MTSNN_API mtsnn_status mtsnn_config_write(const mtsnn_config* cfg, const char* path);
MTSNN_API size_t mtsnn_config_key_count(void);
MTSNN_API const char* mtsnn_config_key_name(size_t index);
MTSNN_API const char* mtsnn_config_key_help(size_t index);

/* Data. */
typedef void (*mtsnn_file_status_fn)(const char* path, const char* status, void* user);
MTSNN_API mtsnn_status mtsnn_fixtures_generate(const char* root, size_t train_per_digit,
                                               size_t test_per_digit, uint64_t seed,
                                               double distortion, double noise_events_per_ms,
                                               size_t* files_written);
/* Fails with checksum-mismatch (MTSNN_ERR_IO) when any file differs. */
MTSNN_API mtsnn_status mtsnn_data_verify(const char* root, mtsnn_file_status_fn fn, void* user,
                                         size_t* checked, size_t* failed);
MTSNN_API mtsnn_status mtsnn_data_fetch(const char* root, const char* train_url,
                                        const char* test_url, mtsnn_file_status_fn fn,
                                        void* user);
/* Loads the splits selected by split_mask using the config's data keys. */
MTSNN_API mtsnn_status mtsnn_dataset_open(const mtsnn_config* cfg, int split_mask,
                                          mtsnn_dataset** out);
MTSNN_API size_t mtsnn_dataset_size(const mtsnn_dataset* ds, int split);
MTSNN_API void mtsnn_dataset_destroy(mtsnn_dataset* ds);

/* Networks and checkpoints (format: docs/checkpoint_format.md). */
MTSNN_API mtsnn_status mtsnn_network_build(const mtsnn_config* cfg, mtsnn_network** out);
MTSNN_API mtsnn_status mtsnn_network_load(const char* path, mtsnn_network** out);
MTSNN_API mtsnn_status mtsnn_network_save(const mtsnn_network* net, const char* path);
MTSNN_API void mtsnn_network_destroy(mtsnn_network* net);

/* Trains a fresh network on the dataset's train split and evaluates it on
 * the test split. Writes per-epoch metrics CSV to metrics_path when non-NULL.
 * Accuracies are percentages, NaN for a task the network does not serve. */
MTSNN_API mtsnn_status mtsnn_train(const mtsnn_config* cfg, const mtsnn_dataset* ds,
                                   const char* metrics_path, mtsnn_network** out_net,
                                   double* task1_acc, double* task2_acc);
/* Accuracy (percent) of the task on the test split under the config's control
 * signal. When result_path is non-NULL one result row is appended there. */
MTSNN_API mtsnn_status mtsnn_evaluate(const mtsnn_network* net, const mtsnn_dataset* ds,
                                      const mtsnn_config* cfg, int task,
                                      const char* result_path, double* accuracy);
/* Runs a sweep family (threshold | gamma | extcurrent | base) over the
 * config's values and seeds. Writes <family>_results.csv and
 * <family>_results.md plus one SVG curve per run into out_dir. */
MTSNN_API mtsnn_status mtsnn_sweep(const mtsnn_config* cfg, const mtsnn_dataset* ds,
                                   const char* family, const char* out_dir);

/* Lowercase hex digest; out must hold 65 bytes. */
MTSNN_API mtsnn_status mtsnn_file_sha256(const char* path, char* out);

#ifdef __cplusplus
}
#endif

#endif /* MTSNN_MTSNN_H_ */
