// SPDX-License-Identifier: Apache-2.0
//
// mmtrack: adaptive beam and channel tracking for mobile mmWave links
// Copyright (C) 2026 mmtrack developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

/* C interface to the mmtrack simulator. Every function returns an
 * mmt_status; on failure a description is available from mmt_last_error()
 * on the calling thread until the next failing call. Objects are opaque
 * handles owned by the caller and released with the matching _free. */

#ifndef MMTRACK_H
#define MMTRACK_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(MMTRACK_BUILDING_LIBRARY)
#    define MMTRACK_API __declspec(dllexport)
#  else
#    define MMTRACK_API __declspec(dllimport)
#  endif
#else
#  define MMTRACK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mmt_status {
    MMT_OK = 0,
    MMT_ERR_NULL_ARGUMENT = 1,
    MMT_ERR_INVALID_ARGUMENT = 2,
    MMT_ERR_CONFIG = 3,
    MMT_ERR_IO = 4,
    MMT_ERR_NUMERICAL = 5,
    MMT_ERR_DIVERGED = 6,
    MMT_ERR_NOT_FOUND = 7,
    MMT_ERR_BUFFER_TOO_SMALL = 8,
    MMT_ERR_INTERNAL = 9
} mmt_status;

typedef struct mmt_config mmt_config;
typedef struct mmt_trace mmt_trace;

MMTRACK_API const char* mmt_version(void);
MMTRACK_API const char* mmt_status_string(mmt_status status);
MMTRACK_API const char* mmt_last_error(void);

/* Run configuration, angles in degrees and SNR in dB. */
MMTRACK_API mmt_status mmt_config_create(mmt_config** out);
MMTRACK_API mmt_status mmt_config_load(const char* path, mmt_config** out);
MMTRACK_API mmt_status mmt_config_parse(const char* text, mmt_config** out);
MMTRACK_API void mmt_config_free(mmt_config* config);
MMTRACK_API mmt_status mmt_config_set(mmt_config* config, const char* key, const char* value);
/* Copies the value (NUL-terminated) into buf; *needed receives the required
 * size including the terminator. MMT_ERR_BUFFER_TOO_SMALL leaves buf unspecified. */
MMTRACK_API mmt_status mmt_config_get(const mmt_config* config, const char* key, char* buf, size_t capacity,
                                      size_t* needed);
MMTRACK_API mmt_status mmt_config_validate(const mmt_config* config);
MMTRACK_API mmt_status mmt_config_format(const mmt_config* config, char* buf, size_t capacity, size_t* needed);
MMTRACK_API size_t mmt_config_key_count(void);
MMTRACK_API const char* mmt_config_key_name(size_t index);

/* Monte-Carlo experiment. Sweep settings in the config are ignored here. */
MMTRACK_API mmt_status mmt_run(const mmt_config* config, mmt_trace** out);
MMTRACK_API void mmt_trace_free(mmt_trace* trace);
MMTRACK_API mmt_status mmt_trace_horizon(const mmt_trace* trace, size_t* horizon);
/* algorithm: "lms" | "bilms" | "ekf" | "none"; group: "aoa" | "aod" | "gain"; step is 1-based. */
MMTRACK_API mmt_status mmt_trace_mse(const mmt_trace* trace, const char* algorithm, const char* group, size_t step,
                                     double* mse, double* std_error);
MMTRACK_API mmt_status mmt_trace_steady_state(const mmt_trace* trace, const char* algorithm, const char* group,
                                              double* mse, double* std_error);
MMTRACK_API mmt_status mmt_trace_diverged(const mmt_trace* trace, const char* algorithm, size_t* count);

/* Runs the experiment or sweep and writes CSV traces plus manifest.cfg. */
MMTRACK_API mmt_status mmt_run_and_write(const mmt_config* config, const char* out_dir, double* wall_seconds);

/* Directivity (1/K) sum_m exp(-2j pi ratio m delta) and its angle derivative. */
MMTRACK_API mmt_status mmt_directivity(int K, double delta, double spacing_ratio, double* re, double* im);
MMTRACK_API mmt_status mmt_directivity_derivative(int K, double delta, double spacing_ratio, double ddelta_dangle,
                                                  double* re, double* im);

#ifdef __cplusplus
}
#endif

#endif
