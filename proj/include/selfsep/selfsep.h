/* C interface to the self-separation toolkit.  All functions return a
 * selfsep_status; on failure selfsep_last_error() describes the problem for
 * the calling thread.  Handles are opaque and must be destroyed by the
 * matching destroy function. */

#ifndef SELFSEP_H
#define SELFSEP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SELFSEP_API __declspec(dllexport)
#else
#define SELFSEP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum selfsep_status {
  SELFSEP_OK = 0,
  SELFSEP_ERR_INVALID_ARGUMENT = 1,
  SELFSEP_ERR_INVALID_STATE = 2,
  SELFSEP_ERR_INFEASIBLE_GEOMETRY = 3,
  SELFSEP_ERR_IO = 4,
  SELFSEP_ERR_PARSE = 5,
  SELFSEP_ERR_NUMERIC = 6,
  SELFSEP_ERR_UNSUPPORTED = 7,
  SELFSEP_ERR_INTERNAL = 8
} selfsep_status;

typedef struct selfsep_config selfsep_config;

SELFSEP_API const char* selfsep_version(void);
SELFSEP_API const char* selfsep_status_name(selfsep_status status);

/* Message for the most recent failure on this thread; empty string if none. */
SELFSEP_API const char* selfsep_last_error(void);

/* Configuration: defaults, file loading, and key-value access using the
 * dotted keys of the config file format. */
SELFSEP_API selfsep_status selfsep_config_create(selfsep_config** out);
SELFSEP_API selfsep_status selfsep_config_load(const char* path,
                                               selfsep_config** out);
SELFSEP_API selfsep_status selfsep_config_set(selfsep_config* config,
                                              const char* key,
                                              const char* value);
/* Writes the formatted value into buffer (NUL-terminated, truncated if
 * needed); required gets the full length excluding the terminator. */
SELFSEP_API selfsep_status selfsep_config_get(const selfsep_config* config,
                                              const char* key, char* buffer,
                                              size_t size, size_t* required);
SELFSEP_API void selfsep_config_destroy(selfsep_config* config);

/* Writes a generated dataset CSV.  split: "train" or "test"; fidelity: "low"
 * or "high".  The generator stream derives from base_seed and the output is
 * reproducible. */
SELFSEP_API selfsep_status selfsep_generate(const selfsep_config* config,
                                            const char* split,
                                            const char* fidelity, uint64_t n,
                                            const char* out_path);

/* Builds the action ensemble over the configured weight grid at one fidelity
 * and writes the cache CSV. */
SELFSEP_API selfsep_status selfsep_ensemble(const selfsep_config* config,
                                            const char* fidelity,
                                            const char* out_path);

/* Fits a model-based method ("map-hf", "map-mf", "bayes-mf") on dataset CSVs
 * and returns the estimated high-fidelity weights (the posterior mean for
 * "bayes-mf").  low_csv may be NULL for "map-hf".  ensemble_low_csv and
 * ensemble_high_csv point to caches written by selfsep_ensemble; pass NULL to
 * simulate the needed ensembles instead. */
SELFSEP_API selfsep_status selfsep_fit(const selfsep_config* config,
                                       const char* method,
                                       const char* high_csv,
                                       const char* low_csv,
                                       const char* ensemble_low_csv,
                                       const char* ensemble_high_csv,
                                       double* w1, double* w2);

/* Fits any method on the given training CSVs, predicts the test CSV, and
 * reports test error, ground-truth lower bound, and efficiency.  On an exact
 * prediction *exact is set to 1 and *efficiency to 0.  Ensemble cache paths
 * behave as in selfsep_fit. */
SELFSEP_API selfsep_status selfsep_score(const selfsep_config* config,
                                         const char* method,
                                         const char* high_csv,
                                         const char* low_csv,
                                         const char* ensemble_low_csv,
                                         const char* ensemble_high_csv,
                                         const char* test_csv, double* error,
                                         double* lower_bound,
                                         double* efficiency, int* exact);

/* Full experiment sweep; writes raw.csv, curves.csv, meta.json, and
 * optionally curves.svg into out_dir. */
SELFSEP_API selfsep_status selfsep_sweep(const selfsep_config* config,
                                         const char* out_dir, int write_svg);

/* Re-aggregates a raw results CSV and renders the efficiency curves SVG. */
SELFSEP_API selfsep_status selfsep_plot(const char* raw_csv, const char* title,
                                        const char* out_svg);

#ifdef __cplusplus
}
#endif

#endif /* SELFSEP_H */
