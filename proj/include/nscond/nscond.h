#ifndef NSCOND_NSCOND_H
#define NSCOND_NSCOND_H

/* C interface to the nscond library: thinned Matérn cluster simulation,
 * conditional parent/offspring intensities and the envelope validation
 * experiment.
 *
 * Every function returns an nsc_status. On failure a message is available
 * from nsc_last_error() on the calling thread until the next call. Handles
 * are opaque and must be released with the matching *_free function.
 * Strings returned through char** are owned by the caller and released with
 * nsc_string_free. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(NSC_BUILDING_LIBRARY)
#define NSC_API __declspec(dllexport)
#else
#define NSC_API __declspec(dllimport)
#endif
#else
#define NSC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nsc_status {
  NSC_OK = 0,
  NSC_ERR_CONFIG = 1,
  NSC_ERR_RUNTIME = 2,
  NSC_ERR_INVALID_ARGUMENT = 3,
  NSC_ERR_IO = 4,
  NSC_ERR_DOMAIN = 5
} nsc_status;

typedef struct nsc_config nsc_config;
typedef struct nsc_pattern nsc_pattern;

NSC_API const char* nsc_version(void);
NSC_API const char* nsc_last_error(void);
NSC_API void nsc_string_free(char* s);

/* ---- configuration ---------------------------------------------------- */

NSC_API nsc_status nsc_config_parse(const char* json_text, nsc_config** out);
NSC_API nsc_status nsc_config_load(const char* path, nsc_config** out);
/* Defaults pinned to the paper's six-cell experiment grid. */
NSC_API nsc_status nsc_config_paper_table1(nsc_config** out);
/* Canonical JSON with every default filled in. */
NSC_API nsc_status nsc_config_serialize(const nsc_config* cfg, char** out_json);
NSC_API void nsc_config_free(nsc_config* cfg);

/* ---- commands --------------------------------------------------------- */

typedef struct nsc_run_options {
  uint64_t seed;
  int has_seed;          /* nonzero: seed overrides the config */
  const char* out_dir;   /* NULL: config "output" */
  unsigned workers;      /* 0: available parallelism */
  int oracle;            /* condint: also emit the Monte Carlo reference */
  double quad_h;         /* <= 0: config default */
  int force_rho_kappa;   /* condint: rho fixed to kappa */
  size_t replicates;     /* 0: config experiment.N */
  size_t sims;           /* 0: config experiment.n_sim */
  int svg;               /* nonzero: write SVG figures */
  const char* observed;  /* condint: CSV of observed points, NULL to simulate */
} nsc_run_options;

NSC_API void nsc_run_options_init(nsc_run_options* opts);

/* Each command writes its artifacts and a manifest.json under the output
 * directory. `summary` (may be NULL) receives a newline-separated report. */
NSC_API nsc_status nsc_cmd_simulate(const nsc_config* cfg, const nsc_run_options* opts,
                                    char** summary);
NSC_API nsc_status nsc_cmd_condint(const nsc_config* cfg, const nsc_run_options* opts,
                                   char** summary);
NSC_API nsc_status nsc_cmd_validate(const nsc_config* cfg, const nsc_run_options* opts,
                                    char** summary);
NSC_API nsc_status nsc_cmd_reproduce_table1(const nsc_config* cfg, const nsc_run_options* opts,
                                            char** summary);

/* ---- point patterns --------------------------------------------------- */

NSC_API nsc_status nsc_pattern_create(const double* xy, size_t n, nsc_pattern** out);
NSC_API nsc_status nsc_pattern_load_csv(const char* path, nsc_pattern** out);
NSC_API size_t nsc_pattern_size(const nsc_pattern* p);
NSC_API nsc_status nsc_pattern_get(const nsc_pattern* p, size_t i, double* x, double* y);
NSC_API void nsc_pattern_free(nsc_pattern* p);

/* Simulates the configured model; returns the observed (thinned, in W)
 * offspring pattern, and optionally the parents. */
NSC_API nsc_status nsc_simulate_pattern(const nsc_config* cfg, uint64_t seed,
                                        nsc_pattern** observed, nsc_pattern** parents);

/* ---- intensities ------------------------------------------------------ */

/* Unconditional offspring intensity kappa * mu * p(x). */
NSC_API nsc_status nsc_intensity(const nsc_config* cfg, double x, double y, double* out);

/* Approximate conditional parent intensity at (x, y) given `observed`. */
NSC_API nsc_status nsc_rho_approx(const nsc_config* cfg, const nsc_pattern* observed, double x,
                                  double y, double* out);

/* Conditional offspring intensity at each of n points (xy interleaved).
 * quad_h <= 0 selects r / 50. */
NSC_API nsc_status nsc_lambda_cond(const nsc_config* cfg, const nsc_pattern* observed,
                                   const double* xy, size_t n, double quad_h, double* out);

#ifdef __cplusplus
}
#endif

#endif /* NSCOND_NSCOND_H */
