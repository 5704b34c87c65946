#ifndef LPMBRW_H
#define LPMBRW_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define LPMBRW_API __declspec(dllexport)
#else
#define LPMBRW_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Values match the exit codes of the command line tool. */
typedef enum lpmbrw_status {
  LPMBRW_OK = 0,
  LPMBRW_ERR_INVALID_ARGUMENT = 1,
  LPMBRW_ERR_PARSE = 2,
  LPMBRW_ERR_MODEL = 3,
  LPMBRW_ERR_BUDGET = 4,
  LPMBRW_ERR_VERIFICATION = 5,
  LPMBRW_ERR_IO = 6,
  LPMBRW_ERR_INTERNAL = 70
} lpmbrw_status;

/* Opaque experiment configuration. */
typedef struct lpmbrw_config lpmbrw_config;

LPMBRW_API const char* lpmbrw_version(void);

/* Message of the last failed call on this thread; "" if none. */
LPMBRW_API const char* lpmbrw_last_error(void);

LPMBRW_API lpmbrw_status lpmbrw_config_from_json(const char* text, lpmbrw_config** out);
LPMBRW_API lpmbrw_status lpmbrw_config_from_file(const char* path, lpmbrw_config** out);
LPMBRW_API void lpmbrw_config_free(lpmbrw_config* cfg);

LPMBRW_API lpmbrw_status lpmbrw_config_set_seed(lpmbrw_config* cfg, uint64_t seed);
LPMBRW_API lpmbrw_status lpmbrw_config_set_replicas(lpmbrw_config* cfg, size_t replicas);
/* 0 selects the hardware concurrency. Results do not depend on it. */
LPMBRW_API lpmbrw_status lpmbrw_config_set_threads(lpmbrw_config* cfg, unsigned threads);

/* Strings returned through char** are owned by the caller. */
LPMBRW_API void lpmbrw_string_free(char* s);

/* Aligned table and JSON document of the analytic constants. */
LPMBRW_API lpmbrw_status lpmbrw_constants(const lpmbrw_config* cfg, char** table,
                                          char** json);

/* Writes CSV files and a manifest into out_dir. */
LPMBRW_API lpmbrw_status lpmbrw_simulate(const lpmbrw_config* cfg, const char* out_dir,
                                         char** summary);

/* Writes report.json and a manifest into out_dir. Returns
   LPMBRW_ERR_VERIFICATION when a criterion fails; summary and report are
   filled in that case too. Either output pointer may be NULL. */
LPMBRW_API lpmbrw_status lpmbrw_verify(const lpmbrw_config* cfg, const char* out_dir,
                                       char** summary, char** report_json);

/* nu(theta) = log E[sum over children of exp(theta xi)]. */
LPMBRW_API lpmbrw_status lpmbrw_nu(const lpmbrw_config* cfg, double theta, double* out);

/* *found is 0 when theta0 is infinite; *out is then left untouched. */
LPMBRW_API lpmbrw_status lpmbrw_theta0(const lpmbrw_config* cfg, double* out, int* found);

/* `count` draws of R*_n at the configured theta, replica i seeded from the
   configured seed. direct != 0 selects the per-leaf sampler. */
LPMBRW_API lpmbrw_status lpmbrw_sample_rstar(const lpmbrw_config* cfg, unsigned n,
                                             size_t count, int direct, double* out);

LPMBRW_API lpmbrw_status lpmbrw_stable_cf(double gamma, double k, double t, double* re,
                                          double* im);
LPMBRW_API lpmbrw_status lpmbrw_k_constant(double gamma, double c_plus, double* out);
LPMBRW_API lpmbrw_status lpmbrw_ks_two_sample(const double* xs, size_t nx,
                                              const double* ys, size_t ny,
                                              double* stat, double* p);

#ifdef __cplusplus
}
#endif

#endif /* LPMBRW_H */
