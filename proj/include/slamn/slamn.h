/* C interface to the slamn filters and simulation harness. */
#ifndef SLAMN_SLAMN_H
#define SLAMN_SLAMN_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SLAMN_BUILDING)
#    define SLAMN_API __declspec(dllexport)
#  else
#    define SLAMN_API __declspec(dllimport)
#  endif
#else
#  define SLAMN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum slamn_status {
    SLAMN_OK = 0,
    SLAMN_ERR_ARGUMENT = 1,  /* null handle/pointer or wrong buffer size */
    SLAMN_ERR_CONFIG = 2,    /* invalid configuration */
    SLAMN_ERR_NUMERICAL = 3, /* filter state became non-finite */
    SLAMN_ERR_SCHEMA = 4,    /* CSV files cannot be compared */
    SLAMN_ERR_IO = 5,        /* file could not be read or written */
    SLAMN_ERR_INTERNAL = 6
} slamn_status;

typedef struct slamn_config slamn_config;
typedef struct slamn_filter slamn_filter;

SLAMN_API const char* slamn_version(void);

/* Message of the last failing call on this thread; "" if none. */
SLAMN_API const char* slamn_last_error(void);

/* Step index carried by the last SLAMN_ERR_NUMERICAL on this thread, or -1. */
SLAMN_API int64_t slamn_last_error_step(void);

SLAMN_API const char* slamn_status_string(slamn_status status);

/* ---- configuration ---- */

SLAMN_API slamn_status slamn_config_load_file(const char* path, slamn_config** out);
SLAMN_API slamn_status slamn_config_load_string(const char* json, slamn_config** out);
SLAMN_API void slamn_config_free(slamn_config* cfg);

SLAMN_API slamn_status slamn_config_set_seed(slamn_config* cfg, uint64_t seed);
/* "basic", "imu", "imu_quat" or "both". */
SLAMN_API slamn_status slamn_config_set_filter(slamn_config* cfg, const char* name);
SLAMN_API slamn_status slamn_config_set_output_dir(slamn_config* cfg, const char* dir);
SLAMN_API slamn_status slamn_config_landmark_count(const slamn_config* cfg, size_t* out);
SLAMN_API slamn_status slamn_config_step_count(const slamn_config* cfg, size_t* out);

/* ---- batch runs ---- */

/* Simulates and writes CSV outputs into the configured output directory.
 * runs > 1 executes run indices 0..runs-1 in parallel with outputs
 * suffixed "_run<k>". */
SLAMN_API slamn_status slamn_run(const slamn_config* cfg, uint32_t runs);

/* Column-wise comparison of two CSV files. On success *summary receives a
 * newly allocated string to release with slamn_string_free. */
SLAMN_API slamn_status slamn_compare(const char* path_a, const char* path_b, char** summary);
SLAMN_API void slamn_string_free(char* s);

/* ---- step-wise filter ---- */

/* Filter kind "basic", "imu" or "imu_quat", initialised and tuned from cfg. */
SLAMN_API slamn_status slamn_filter_create(const slamn_config* cfg, const char* kind, slamn_filter** out);
SLAMN_API void slamn_filter_free(slamn_filter* f);

/* One update.
 *   u_m[6]         measured [omega; v] (body frame)
 *   y[3 * n]       body-frame feature vectors, n = landmark count
 *   a[3 * n_refs]  body-frame observations of the configured reference
 *                  vectors (ignored by "basic"; may be NULL there) */
SLAMN_API slamn_status slamn_filter_step(slamn_filter* f, const double* u_m, const double* y, size_t y_len,
                                         const double* a, size_t a_len, double dt);

/* rotation[9] row-major, position[3]. */
SLAMN_API slamn_status slamn_filter_get_pose(const slamn_filter* f, double* rotation, double* position);
/* out[3 * n]; out_len must be at least 3 * n. */
SLAMN_API slamn_status slamn_filter_get_landmarks(const slamn_filter* f, double* out, size_t out_len);
/* bias[6] = [b_omega; b_v]. */
SLAMN_API slamn_status slamn_filter_get_bias(const slamn_filter* f, double* bias);
SLAMN_API slamn_status slamn_filter_step_index(const slamn_filter* f, uint64_t* out);

#ifdef __cplusplus
}
#endif

#endif /* SLAMN_SLAMN_H */
