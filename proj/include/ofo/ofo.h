/* C interface to the ofo library.
 *
 * Objects are opaque handles released with the matching *_free function.
 * Every fallible call returns an ofo_status; on failure the message is
 * available from ofo_last_error() on the same thread until the next call.
 * Strings returned through `const char**` are owned by the handle they came
 * from and stay valid until it is freed.
 */
#ifndef OFO_OFO_H
#define OFO_OFO_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(OFO_BUILDING_LIBRARY)
#    define OFO_API __declspec(dllexport)
#  else
#    define OFO_API __declspec(dllimport)
#  endif
#else
#  define OFO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ofo_status {
  OFO_OK = 0,
  OFO_ERR_INPUT = 2,       /* malformed scenario, bad arguments, non-Hurwitz plant */
  OFO_NOT_CERTIFIED = 3,   /* certificate computed, bound not satisfied */
  OFO_ERR_DIVERGENCE = 4,  /* non-finite state during integration */
  OFO_ERR_IO = 5,          /* file could not be read or written */
  OFO_ERR_INTERNAL = 6
} ofo_status;

typedef struct ofo_scenario ofo_scenario;
typedef struct ofo_report ofo_report;
typedef struct ofo_trajectory ofo_trajectory;

typedef struct ofo_sweep_row {
  double alpha;
  int status; /* OFO_OK, OFO_ERR_DIVERGENCE or OFO_ERR_INPUT */
  double settling_time;
  double overshoot;
  double final_error;
  double max_violation;
} ofo_sweep_row;

typedef struct ofo_run_summary {
  double final_error;
  double settling_time;
  double overshoot;
  double max_violation;
  size_t samples;
  size_t warnings;
} ofo_run_summary;

OFO_API const char* ofo_last_error(void);
OFO_API const char* ofo_status_string(ofo_status status);

/* Scenarios. */
OFO_API ofo_status ofo_scenario_load(const char* path, ofo_scenario** out);
OFO_API ofo_status ofo_scenario_parse(const char* text, const char* source_name, ofo_scenario** out);
/* figure is "fig1" or "fig2". */
OFO_API ofo_status ofo_scenario_bundled(const char* figure, ofo_scenario** out);
OFO_API ofo_status ofo_scenario_serialize(const ofo_scenario* scenario, const char** text);
OFO_API ofo_status ofo_scenario_save(const ofo_scenario* scenario, const char* path);
OFO_API ofo_status ofo_scenario_set_alpha(ofo_scenario* scenario, double alpha);
/* Alphas listed in the scenario's sweep section (may be zero). */
OFO_API size_t ofo_scenario_sweep_alphas(const ofo_scenario* scenario, const double** alphas);
OFO_API int ofo_scenario_equal(const ofo_scenario* a, const ofo_scenario* b);
OFO_API void ofo_scenario_free(ofo_scenario* scenario);

/* Certificate. Returns OFO_OK or OFO_NOT_CERTIFIED with a report in *out;
 * other codes leave *out NULL. */
OFO_API ofo_status ofo_certify(const ofo_scenario* scenario, ofo_report** out);
OFO_API int ofo_report_certified(const ofo_report* report);
OFO_API const char* ofo_report_text(const ofo_report* report);
/* Decay rate at the scenario's gain; NaN when not certified. */
OFO_API double ofo_report_tau(const ofo_report* report);
OFO_API double ofo_report_tau_at_alpha(const ofo_report* report, double alpha);
OFO_API double ofo_report_mu_bound_rhs(const ofo_report* report);
OFO_API double ofo_report_required_mu4(const ofo_report* report);
OFO_API void ofo_report_free(ofo_report* report);

/* Single run. On divergence returns OFO_ERR_DIVERGENCE and *out is NULL. */
OFO_API ofo_status ofo_simulate(const ofo_scenario* scenario, ofo_trajectory** out);
OFO_API ofo_status ofo_trajectory_write_csv(const ofo_trajectory* traj, const char* path);
OFO_API ofo_status ofo_trajectory_csv(const ofo_trajectory* traj, const char** text);
OFO_API ofo_status ofo_trajectory_summary(const ofo_trajectory* traj, ofo_run_summary* out);
OFO_API size_t ofo_trajectory_size(const ofo_trajectory* traj);
OFO_API const char* ofo_trajectory_warning(const ofo_trajectory* traj, size_t index);
OFO_API void ofo_trajectory_free(ofo_trajectory* traj);

/* Batch runs. threads = 0 picks the hardware concurrency capped by
 * OFO_THREADS. `rows` (optional) receives n entries in the order of `alphas`. */
OFO_API ofo_status ofo_sweep(const ofo_scenario* scenario, const double* alphas, size_t n,
                             const char* out_dir, unsigned threads, ofo_sweep_row* rows);
/* Writes scenario.yaml, certificate.txt, trajectory CSVs and summary.csv. */
OFO_API ofo_status ofo_reproduce(const char* figure, const char* out_dir, unsigned threads);

#ifdef __cplusplus
}
#endif

#endif /* OFO_OFO_H */
