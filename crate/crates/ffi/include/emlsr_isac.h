#ifndef EMLSR_ISAC_H
#define EMLSR_ISAC_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum EmlsrStatus {
  EMLSR_STATUS_OK = 0,
  EMLSR_STATUS_NULL_POINTER = 1,
  EMLSR_STATUS_INVALID_CONFIG = 2,
  EMLSR_STATUS_IO = 3,
  EMLSR_STATUS_PARSE = 4,
  EMLSR_STATUS_INVALID_ARGUMENT = 5,
  EMLSR_STATUS_INTERNAL = 6,
} EmlsrStatus;

typedef enum EmlsrScheme {
  EMLSR_SCHEME_ORIGINAL = 0,
  EMLSR_SCHEME_RSMS_S = 1,
  EMLSR_SCHEME_RSMS_C = 2,
  EMLSR_SCHEME_RSMS_SC = 3,
} EmlsrScheme;

typedef enum EmlsrMode {
  EMLSR_MODE_NON_COOPERATIVE = 0,
  EMLSR_MODE_COOPERATIVE = 1,
} EmlsrMode;

/**
 * Opaque simulation configuration.
 */
typedef struct EmlsrConfig EmlsrConfig;

/**
 * Opaque result of one simulation run.
 */
typedef struct EmlsrRun EmlsrRun;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Writes the last error message of this thread into `buf` (NUL-terminated)
 * if `len` is large enough. Returns the buffer size the message needs.
 *
 * # Safety
 * `buf` must be null or valid for writes of `len` bytes.
 */
size_t emlsr_last_error(char *buf, size_t len);

/**
 * New configuration with the default three-link, twelve-station scenario.
 */
struct EmlsrConfig *emlsr_config_default(void);

/**
 * Parses a configuration from TOML text into `*out`.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum EmlsrStatus emlsr_config_from_toml(const char *text, struct EmlsrConfig **out);

/**
 * Reads a TOML configuration file into `*out`.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum EmlsrStatus emlsr_config_load(const char *path, struct EmlsrConfig **out);

/**
 * Serializes the configuration to TOML. Follows the [`emlsr_last_error`]
 * buffer convention; `*needed` receives the size including the NUL.
 *
 * # Safety
 * `cfg` must come from this library; `buf` must be null or valid for `len`
 * bytes; `needed` must be null or valid.
 */
enum EmlsrStatus emlsr_config_to_toml(const struct EmlsrConfig *cfg,
                                      char *buf,
                                      size_t len,
                                      size_t *needed);

/**
 * # Safety
 * `cfg` must be null or a handle from this library not yet freed.
 */
void emlsr_config_free(struct EmlsrConfig *cfg);

/**
 * Setters store the value as given; [`emlsr_config_validate`] reports
 * out-of-range values.
 *
 * # Safety
 * `cfg` must be a live handle from this library.
 */
enum EmlsrStatus emlsr_config_set_alpha(struct EmlsrConfig *cfg, double alpha);

/**
 * # Safety
 * `cfg` must be a live handle from this library.
 */
enum EmlsrStatus emlsr_config_set_k(struct EmlsrConfig *cfg, size_t k);

/**
 * # Safety
 * `cfg` must be a live handle from this library.
 */
enum EmlsrStatus emlsr_config_set_n_stas(struct EmlsrConfig *cfg, size_t n_stas);

/**
 * # Safety
 * `cfg` must be a live handle from this library.
 */
enum EmlsrStatus emlsr_config_set_seed(struct EmlsrConfig *cfg, uint64_t seed);

/**
 * # Safety
 * `cfg` must be a live handle from this library.
 */
enum EmlsrStatus emlsr_config_set_n_windows(struct EmlsrConfig *cfg, uint32_t n_windows);

/**
 * # Safety
 * `cfg` must be a live handle from this library.
 */
enum EmlsrStatus emlsr_config_set_scheme(struct EmlsrConfig *cfg, enum EmlsrScheme scheme);

/**
 * # Safety
 * `cfg` must be a live handle from this library.
 */
enum EmlsrStatus emlsr_config_set_mode(struct EmlsrConfig *cfg, enum EmlsrMode mode);

/**
 * `Ok` when the configuration is runnable; otherwise `InvalidConfig` with
 * every violation in the error message.
 *
 * # Safety
 * `cfg` must be a live handle from this library.
 */
enum EmlsrStatus emlsr_config_validate(const struct EmlsrConfig *cfg);

/**
 * Minimum sensing, communications and overall exchange durations in ns.
 *
 * # Safety
 * `cfg` must be a live handle; the output pointers must be valid.
 */
enum EmlsrStatus emlsr_min_durations_ns(const struct EmlsrConfig *cfg,
                                        uint64_t *sensing,
                                        uint64_t *comm,
                                        uint64_t *any);

/**
 * Jain's fairness index of `n` values; 1 for an all-zero or empty input.
 *
 * # Safety
 * `values` must be valid for `n` reads (or null when `n` is 0).
 */
double emlsr_jain_index(const double *values, size_t n);

/**
 * Runs the simulation described by `cfg` and stores the result in `*out`.
 * With `trace` set the per-event trace is kept for [`emlsr_run_trace`].
 *
 * # Safety
 * `cfg` must be a live handle and `out` a valid pointer.
 */
enum EmlsrStatus emlsr_run(const struct EmlsrConfig *cfg, bool trace, struct EmlsrRun **out);

/**
 * # Safety
 * `run` must be null or a handle from this library not yet freed.
 */
void emlsr_run_free(struct EmlsrRun *run);

/**
 * Mean squared tracking error in m²; NaN for a null handle.
 *
 * # Safety
 * `run` must be null or a live handle from this library.
 */
double emlsr_run_mse_mean(const struct EmlsrRun *run);

/**
 * DL throughput in bit/s; NaN for a null handle.
 *
 * # Safety
 * `run` must be null or a live handle from this library.
 */
double emlsr_run_throughput(const struct EmlsrRun *run);

/**
 * Jain's index of delivered bytes; NaN for a null handle.
 *
 * # Safety
 * `run` must be null or a live handle from this library.
 */
double emlsr_run_jain(const struct EmlsrRun *run);

/**
 * Simulated time in seconds; NaN for a null handle.
 *
 * # Safety
 * `run` must be null or a live handle from this library.
 */
double emlsr_run_sim_time(const struct EmlsrRun *run);

/**
 * Sensing exchanges performed; 0 for a null handle.
 *
 * # Safety
 * `run` must be null or a live handle from this library.
 */
uint64_t emlsr_run_sensing_count(const struct EmlsrRun *run);

/**
 * Communications exchanges performed; 0 for a null handle.
 *
 * # Safety
 * `run` must be null or a live handle from this library.
 */
uint64_t emlsr_run_comm_count(const struct EmlsrRun *run);

/**
 * TXOPs forfeited; 0 for a null handle.
 *
 * # Safety
 * `run` must be null or a live handle from this library.
 */
uint64_t emlsr_run_skip_count(const struct EmlsrRun *run);

/**
 * Number of stations (length of the delivered-bytes array).
 *
 * # Safety
 * `run` must be null or a live handle from this library.
 */
size_t emlsr_run_n_stas(const struct EmlsrRun *run);

/**
 * Copies per-station delivered bytes into `buf`, which must hold
 * [`emlsr_run_n_stas`] entries.
 *
 * # Safety
 * `run` must be a live handle and `buf` valid for `len` writes.
 */
enum EmlsrStatus emlsr_run_delivered_bytes(const struct EmlsrRun *run, uint64_t *buf, size_t len);

/**
 * Copies the event trace (CSV with header) using the [`emlsr_last_error`]
 * buffer convention and returns the size needed. Empty unless the run was
 * started with tracing.
 *
 * # Safety
 * `run` must be null or a live handle; `buf` must be null or valid for `len`
 * bytes.
 */
size_t emlsr_run_trace(const struct EmlsrRun *run, char *buf, size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EMLSR_ISAC_H */
