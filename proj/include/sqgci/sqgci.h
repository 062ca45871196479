/* Copyright 2026 The sqgci Authors
 * SPDX-License-Identifier: Apache-2.0 */

/* C interface of the sqgci library.
 *
 * Every function returns a status code. On failure a message is available from
 * sqgci_last_error() until the next call on the same thread. Strings returned
 * through char** out-parameters are owned by the caller and released with
 * sqgci_string_free(). Handles are released with their *_free function;
 * passing NULL to any *_free function is a no-op. */

#ifndef SQGCI_H
#define SQGCI_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define SQGCI_API __declspec(dllexport)
#else
#define SQGCI_API __attribute__((visibility("default")))
#endif

typedef enum sqgci_status {
  SQGCI_OK = 0,
  SQGCI_E_INVALID_ARGUMENT = 1,
  SQGCI_E_NON_FINITE = 2,
  SQGCI_E_ALIASING = 3,
  SQGCI_E_POSITIVITY = 4,
  SQGCI_E_CONSISTENCY = 5,
  SQGCI_E_BAND_LEAKAGE = 6,
  SQGCI_E_IO = 7,
  SQGCI_E_PARSE = 8,
  SQGCI_E_INVALID_PARAMS = 9,
  SQGCI_E_INTERNAL = 99
} sqgci_status;

typedef enum sqgci_norm_kind {
  SQGCI_NORM_SUP = 0,
  SQGCI_NORM_X = 1,     /* sup of f, R1o f and R2o f summed */
  SQGCI_NORM_HOLDER = 2 /* dyadic-block proxy of order s */
} sqgci_norm_kind;

typedef enum sqgci_export_format {
  SQGCI_EXPORT_CSV = 0,     /* i,j,x1,x2,value */
  SQGCI_EXPORT_SPECTRUM = 1 /* k1,k2,abs for nonzero coefficients */
} sqgci_export_format;

typedef struct sqgci_config sqgci_config;
typedef struct sqgci_field sqgci_field;

SQGCI_API const char* sqgci_version(void);
SQGCI_API const char* sqgci_status_name(sqgci_status status);
SQGCI_API const char* sqgci_last_error(void);
SQGCI_API void sqgci_string_free(char* s);

/* Configuration: flat "key = value" text. */
SQGCI_API sqgci_status sqgci_config_new(sqgci_config** out);
SQGCI_API sqgci_status sqgci_config_parse(const char* text, sqgci_config** out);
/* Reads a file; SQGCI_OUTPUT_DIR overrides output_dir when set. */
SQGCI_API sqgci_status sqgci_config_load(const char* path, sqgci_config** out);
SQGCI_API sqgci_status sqgci_config_set(sqgci_config* cfg, const char* key, const char* value);
/* Canonical text of one value. */
SQGCI_API sqgci_status sqgci_config_get(const sqgci_config* cfg, const char* key, char** value);
SQGCI_API sqgci_status sqgci_config_to_string(const sqgci_config* cfg, char** text);
SQGCI_API sqgci_status sqgci_config_output_dir(const sqgci_config* cfg, char** dir);
SQGCI_API void sqgci_config_free(sqgci_config* cfg);

/* Parameter verdict as JSON; *valid is 1 iff every inequality holds. */
SQGCI_API sqgci_status sqgci_validate_params(const sqgci_config* cfg, int* valid, char** json);

/* Writes state 0 into out_dir. */
SQGCI_API sqgci_status sqgci_init(const sqgci_config* cfg, const char* out_dir);

/* Runs up to state 2 * stages into out_dir, optionally resuming from a state
 * directory (resume may be NULL). Progress goes to stderr when verbose != 0.
 * A run stopped by the engine returns its error code; the states reached stay
 * on disk and *final_state (may be NULL) holds the last one. */
SQGCI_API sqgci_status sqgci_run(const sqgci_config* cfg, int stages, const char* out_dir,
                                 const char* resume, int verbose, int* final_state);

/* Checks a run directory or a single state directory. *pass is 1 iff every
 * gating invariant holds; json receives the full report. */
SQGCI_API sqgci_status sqgci_verify(const char* dir, int* pass, char** json);

/* Fields stored as SQF1 files. */
SQGCI_API sqgci_status sqgci_field_load(const char* path, sqgci_field** out);
SQGCI_API sqgci_status sqgci_field_save(const sqgci_field* f, const char* path);
/* Copies n * n row-major samples; n must be a power of two. */
SQGCI_API sqgci_status sqgci_field_from_samples(int n, const double* samples, sqgci_field** out);
SQGCI_API int sqgci_field_grid(const sqgci_field* f);
SQGCI_API const double* sqgci_field_samples(const sqgci_field* f);
SQGCI_API sqgci_status sqgci_field_norm(const sqgci_field* f, sqgci_norm_kind kind, double s,
                                        double* value);
/* Writes to path, or to stdout when path is NULL or "-". */
SQGCI_API sqgci_status sqgci_field_export(const sqgci_field* f, sqgci_export_format format,
                                          const char* path);
SQGCI_API void sqgci_field_free(sqgci_field* f);

#ifdef __cplusplus
}
#endif

#endif /* SQGCI_H */
