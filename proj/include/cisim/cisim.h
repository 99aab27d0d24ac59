/* C interface to the cisim simulator. All functions are thread-safe for
 * distinct handles; error messages are kept per thread. */
#ifndef CISIM_H
#define CISIM_H

#include <stddef.h>

#if defined(CISIM_BUILDING_LIBRARY)
#define CISIM_API __attribute__((visibility("default")))
#else
#define CISIM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct cisim_config cisim_config;
typedef struct cisim_result cisim_result;

typedef enum cisim_status {
  CISIM_OK = 0,
  CISIM_ERR_PARSE = 2,      /* malformed config or unknown key */
  CISIM_ERR_DOMAIN = 3,     /* input outside an operation's domain */
  CISIM_ERR_RESOLUTION = 4, /* grid resolution, omega*t cap or sweep size cap */
  CISIM_ERR_INTERNAL = 5,   /* broken internal invariant */
  CISIM_ERR_INVALID_ARGUMENT = 6,
  CISIM_ERR_UNIT = 7        /* unknown unit or dimension mismatch */
} cisim_status;

CISIM_API const char* cisim_version(void);

/* Message and kind ("parse", "domain", ...) of the last failure on this thread. */
CISIM_API const char* cisim_last_error(void);
CISIM_API const char* cisim_last_error_kind(void);

CISIM_API cisim_status cisim_config_load(const char* path, cisim_config** out);
CISIM_API cisim_status cisim_config_parse(const char* json_text, cisim_config** out);
/* Overwrites an existing numeric entry, e.g. "sphere.radius_um". */
CISIM_API cisim_status cisim_config_set_number(cisim_config* cfg, const char* dotted_key, double value);
CISIM_API cisim_status cisim_config_set_margin(cisim_config* cfg, double margin);
CISIM_API cisim_status cisim_config_set_cap_omega_t(cisim_config* cfg, double cap);
CISIM_API cisim_status cisim_config_set_workers(cisim_config* cfg, unsigned workers);
CISIM_API void cisim_config_free(cisim_config* cfg);

/* subcommand: coherence, ci-gain, fringes, protocol, budget, falsify, sweep. */
CISIM_API cisim_status cisim_run(const cisim_config* cfg, const char* subcommand, cisim_result** out);

CISIM_API size_t cisim_result_artifact_count(const cisim_result* r);
CISIM_API const char* cisim_result_artifact_name(const cisim_result* r, size_t i);
CISIM_API const char* cisim_result_artifact_data(const cisim_result* r, size_t i, size_t* length);

/* Flat summary; non-numeric entries have value NaN and a text form. */
CISIM_API size_t cisim_result_summary_count(const cisim_result* r);
CISIM_API const char* cisim_result_summary_key(const cisim_result* r, size_t i);
CISIM_API double cisim_result_summary_value(const cisim_result* r, size_t i);
CISIM_API const char* cisim_result_summary_text(const cisim_result* r, size_t i);
CISIM_API cisim_status cisim_result_scalar(const cisim_result* r, const char* key, double* value);

CISIM_API size_t cisim_result_warning_count(const cisim_result* r);
CISIM_API const char* cisim_result_warning(const cisim_result* r, size_t i);
CISIM_API void cisim_result_free(cisim_result* r);

/* Direct helpers, SI in and out. */
CISIM_API cisim_status cisim_convert(double value, const char* from_unit, const char* to_unit, double* out);
CISIM_API cisim_status cisim_sphere_mass(double radius_m, double density_kg_per_m3, double* mass_kg);
CISIM_API cisim_status cisim_ci_gain(double omega0, double omega_inverted, double t_inflate, double* g,
                                     double* g_x, double* g_p);
CISIM_API cisim_status cisim_t_lambda(double mass_kg, double omega0, double lambda_hz_per_m2, double* t_lambda_s,
                                      double* xi_m);

#ifdef __cplusplus
}
#endif

#endif
