#ifndef DSPEC_DSPEC_H
#define DSPEC_DSPEC_H

/* C interface to the dspec experiment runner. Handles are opaque; every
 * fallible call returns a dspec_status and leaves a message retrievable with
 * dspec_last_error() on the calling thread. */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define DSPEC_API __declspec(dllexport)
#else
#define DSPEC_API __attribute__((visibility("default")))
#endif

typedef enum dspec_status {
  DSPEC_OK = 0,
  DSPEC_ERR_INPUT = 1,
  DSPEC_ERR_UNSUPPORTED = 2,
  DSPEC_ERR_RESOURCE = 3,
  DSPEC_ERR_PARTITION = 4,
  DSPEC_ERR_NUMERICAL = 5,
  DSPEC_ERR_SETUP = 6,
  DSPEC_ERR_CONFIG = 7,
  DSPEC_ERR_INTERNAL = 8
} dspec_status;

typedef struct dspec_config dspec_config;
typedef struct dspec_result dspec_result;

DSPEC_API const char* dspec_version(void);
DSPEC_API const char* dspec_status_name(dspec_status status);
/* Message of the last failed call on this thread; "" if none. */
DSPEC_API const char* dspec_last_error(void);

/* Presets compiled into the library, sorted by name. */
DSPEC_API size_t dspec_preset_count(void);
DSPEC_API const char* dspec_preset_name(size_t index);
/* JSON text of the preset, or NULL when no preset has that name. */
DSPEC_API const char* dspec_preset_json(const char* name);

/* Configs. `verb` may be NULL; otherwise it must name the config's pipeline
 * (check-tempered, profile-complexity, ap-test, equicontinuity, verify-theorem).
 * A nonzero `has_seed` replaces the config seed with `seed`. */
DSPEC_API dspec_status dspec_config_from_json(const char* json, const char* verb, int has_seed, uint64_t seed,
                                              dspec_config** out);
DSPEC_API dspec_status dspec_config_from_file(const char* path, const char* verb, int has_seed, uint64_t seed,
                                              dspec_config** out);
DSPEC_API dspec_status dspec_config_from_preset(const char* name, const char* verb, int has_seed, uint64_t seed,
                                                dspec_config** out);
/* Lowercase hex SHA-256, 64 characters plus NUL. */
DSPEC_API dspec_status dspec_config_hash(const dspec_config* config, char out[65]);
DSPEC_API const char* dspec_config_pipeline(const dspec_config* config);
DSPEC_API void dspec_config_free(dspec_config* config);

/* Runs the configured pipeline. Outputs do not depend on `workers`;
 * `timings` adds wall-clock columns and fields. */
DSPEC_API dspec_status dspec_run(const dspec_config* config, int workers, int timings, dspec_result** out);
/* 0 done, 2 conclusive disagreement between the two sides of a crosscheck. */
DSPEC_API int dspec_result_exit_code(const dspec_result* result);
DSPEC_API size_t dspec_result_file_count(const dspec_result* result);
DSPEC_API const char* dspec_result_file_name(const dspec_result* result, size_t index);
DSPEC_API const char* dspec_result_file_data(const dspec_result* result, size_t index, size_t* size);
DSPEC_API const char* dspec_result_summary(const dspec_result* result);
DSPEC_API dspec_status dspec_result_write(const dspec_result* result, const char* directory);
DSPEC_API void dspec_result_free(dspec_result* result);

/* One-shot: parse, run, write into `directory`; *exit_code gets the process
 * status the CLI would use (0, 2, or 1 on error). */
DSPEC_API dspec_status dspec_run_config(const char* json, const char* directory, int workers, int* exit_code);

#ifdef __cplusplus
}
#endif

#endif
