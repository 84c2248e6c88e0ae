/* Copyright 2026 The discovery authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to the discovery simulator.
 *
 * Every function that can fail returns a dsc_status. On failure a message is
 * available from dsc_last_error() on the same thread until the next call.
 * String outputs follow the usual two-call pattern: pass a NULL buffer to
 * learn the required size (including the terminating NUL) through `needed`.
 */
#ifndef DISCOVERY_DISCOVERY_H
#define DISCOVERY_DISCOVERY_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define DSC_API __declspec(dllexport)
#else
#define DSC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dsc_status {
    DSC_OK = 0,
    DSC_ERR_INVALID_ARGUMENT = 1, /* null pointer, index out of range */
    DSC_ERR_CONFIG = 2,           /* configuration or input rejected by validation */
    DSC_ERR_IO = 3,
    DSC_ERR_FIT = 4,
    DSC_ERR_GENERATION = 5,
    DSC_ERR_ESTIMATION = 6,
    DSC_ERR_ANALYSIS = 7,
    DSC_ERR_BUFFER_TOO_SMALL = 8,
    DSC_ERR_INTERNAL = 9
} dsc_status;

typedef struct dsc_space dsc_space;
typedef struct dsc_config dsc_config;

DSC_API const char* dsc_version(void);
DSC_API const char* dsc_last_error(void);
DSC_API const char* dsc_status_name(int status);

/* ---- model space ---- */

DSC_API int dsc_space_create(int k, dsc_space** out);
DSC_API void dsc_space_destroy(dsc_space* space);
DSC_API size_t dsc_space_size(const dsc_space* space);
DSC_API int dsc_space_factors(const dsc_space* space);
DSC_API int dsc_space_model_string(const dsc_space* space, size_t index, char* buf, size_t buflen, size_t* needed);
/* Parameter count and highest interaction order of a model. */
DSC_API int dsc_space_model_shape(const dsc_space* space, size_t index, int* parameters, int* highest_order);
/* Index of a model given as text such as "x1 + x2 + x1x2". */
DSC_API int dsc_space_parse_model(const dsc_space* space, const char* text, size_t* index);

/* ---- configuration ---- */

DSC_API int dsc_config_create(dsc_config** out);
DSC_API void dsc_config_destroy(dsc_config* config);
/* Applies a flat "key = value" file on top of the current values. */
DSC_API int dsc_config_load_file(dsc_config* config, const char* path);
DSC_API int dsc_config_set(dsc_config* config, const char* key, const char* value);
DSC_API int dsc_config_get(const dsc_config* config, const char* key, char* buf, size_t buflen, size_t* needed);
/* 1 when the key was set by a file or dsc_config_set, else 0. */
DSC_API int dsc_config_is_set(const dsc_config* config, const char* key);
DSC_API int dsc_config_validate(const dsc_config* config);

/* ---- runs ---- */

typedef void (*dsc_progress_fn)(size_t done, size_t total, void* user);

typedef struct dsc_sweep_stats {
    size_t rows;
    size_t computed;
    size_t reused;
    size_t failed;
    double seconds;
} dsc_sweep_stats;

/* Factorial agent-based sweep; writes the results CSV and its JSON sidecar. */
DSC_API int dsc_run_abm(const dsc_config* config, dsc_progress_fn progress, void* user, dsc_sweep_stats* stats);

/* Chain analysis without replication; writes the per-cell CSV at the output
 * path plus "<stem>_models.csv", "<stem>_transitions.csv" and the sidecar. */
DSC_API int dsc_run_chain(const dsc_config* config, dsc_sweep_stats* stats);

/* group_by and metrics are comma lists; metrics may be NULL for the default
 * set. spearman_output may be NULL. */
DSC_API int dsc_summarize(const char* input, const char* output, const char* group_by, const char* metrics,
                          int cell_means, const char* spearman_output);

typedef struct dsc_criterion {
    int id;
    const char* title;
    int passed;
    int gating;
    const char* detail;
    double seconds;
} dsc_criterion;

typedef void (*dsc_criterion_fn)(const dsc_criterion* result, void* user);

typedef struct dsc_verify_options {
    uint64_t seed;
    int workers;
    const char* cache_dir; /* may be NULL */
    int sweep_replications;
    long sweep_timesteps;
    const int* only; /* criterion ids to run; NULL or empty runs all */
    size_t only_count;
    const char* output; /* optional CSV of results; may be NULL */
} dsc_verify_options;

DSC_API void dsc_verify_options_init(dsc_verify_options* options);
/* failed receives the number of gating criteria that did not pass. */
DSC_API int dsc_verify(const dsc_verify_options* options, dsc_criterion_fn on_result, void* user, int* failed);

/* ---- numerics ---- */

/* defined is set to 0 when either ranking has zero variance. */
DSC_API int dsc_spearman(const double* x, const double* y, size_t n, double* rho, int* defined);
/* p is an L x L row-stochastic matrix in row-major order. */
DSC_API int dsc_stationary(const double* p, size_t L, double* pi);
DSC_API int dsc_mfpt(const double* p, size_t L, size_t target, double* tau);

#ifdef __cplusplus
}
#endif

#endif
