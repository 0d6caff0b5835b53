/* C interface to the transverse-pumping simulator.
 *
 * Every fallible call returns a tp_status; on failure tp_last_error() gives a
 * message for the calling thread. Handles are opaque and owned by the caller. */
#ifndef TPUMP_TPUMP_H
#define TPUMP_TPUMP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(TPUMP_BUILDING_LIBRARY)
#    define TP_API __declspec(dllexport)
#  else
#    define TP_API __declspec(dllimport)
#  endif
#else
#  define TP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tp_status {
  TP_OK = 0,
  TP_ERR_INVALID_ARGUMENT = 1,
  TP_ERR_NUMERICAL = 2,
  TP_ERR_OUT_OF_RANGE = 3,
  TP_ERR_NULL_POINTER = 4,
  TP_ERR_INTERNAL = 5
} tp_status;

enum { TP_METHOD_ADAPTIVE = 0, TP_METHOD_RK4 = 1 };
enum { TP_ENGINE_MASTER = 0, TP_ENGINE_BLOCH = 1 };
enum { TP_FLAVOR_FULL = 0, TP_FLAVOR_SIMPLIFIED = 1 };
enum { TP_FZ_SAME = 0, TP_FZ_OPPOSITE = 1 };
enum {
  TP_INIT_MIXED = 0,
  TP_INIT_ZERO = 1,
  TP_INIT_UP = 2,
  TP_INIT_DOWN = 3,
  TP_INIT_DARK_PLUS = 4,
  TP_INIT_DARK_MINUS = 5,
  TP_INIT_PLUS_X = 6
};
enum { TP_SCAN_OMEGA = 0, TP_SCAN_THETA = 1 };
enum { TP_READOUT_FIXED = 0, TP_READOUT_STEADY = 1 };
enum { TP_PASSAGE_EXACT_ZERO = 0, TP_PASSAGE_PREPUMP = 1 };
enum { TP_PROFILE_CONSTANT = 0, TP_PROFILE_RAMP = 1, TP_PROFILE_PIECEWISE = 2 };
enum { TP_BRANCH_PLUS = 0, TP_BRANCH_MINUS = 1 };

typedef struct tp_params {
  double omega_B;
  double Omega;
  double gamma_e;
  double gamma;
} tp_params;

typedef struct tp_integrator {
  int method;
  double rtol;
  double atol;
  double max_step;   /* <= 0: engine default */
  double fixed_step; /* <= 0: max step */
} tp_integrator;

typedef struct tp_variant {
  int flavor;
  int fz_sign;
  int include_fminus_term;
  int include_alignment_drive;
} tp_variant;

/* Bloch trajectories leave the master-only fields at NaN. */
typedef struct tp_sample {
  double t;
  double Fx, Fy, Fz, Fzz, Azx, Azy;
  double rho_ee;
  double trace;
  double fid_dplus;
  double fid_dminus;
  double hermiticity_residual;
  double min_eigenvalue;
  double predicted_drift;
  double first_order_drift;
} tp_sample;

typedef struct tp_run_stats {
  uint64_t accepted;
  uint64_t rejected;
  uint64_t rhs_evals;
  int moment_bounds_ok;
  int stopped_early;
  double max_adiabaticity_ratio;
} tp_run_stats;

typedef struct tp_scan_options {
  int parameter;
  int engine;
  tp_variant variant;
  double t_final;
  int initial_state;
  int readout;
  double steady_epsilon;
  size_t samples;
  unsigned threads;
} tp_scan_options;

typedef struct tp_extremum {
  size_t index;
  double value;
  double fz;
  double refined_value;
  double refined_fz;
  int is_maximum;
} tp_extremum;

/* Component order: Fx, Fy, Fz, Fzz, Azx, Azy. */
typedef struct tp_compare_report {
  double max_abs[6];
  double rms[6];
  int in_regime;
} tp_compare_report;

typedef struct tp_sign_report {
  int winner;
  int ambiguous;
  double rms_same;
  double rms_opposite;
  uint64_t scenario_hash;
  tp_params params;
  double theta;
  double omega;
  double t_end;
} tp_sign_report;

typedef struct tp_excited_report {
  size_t samples_checked;
  double max_coherence_deviation;
  double max_population_deviation;
  double relative_coherence_deviation;
  double relative_population_deviation;
} tp_excited_report;

typedef struct tp_preset {
  char name[16];
  char kind[16];
  tp_params params;
  int profile;
  double omega;
  double theta;
  double ramp_duration;
  double t_final;
  int initial_state;
  size_t scan_count;
  double scan_min;
  double scan_max;
} tp_preset;

typedef struct tp_schedule tp_schedule;
typedef struct tp_trajectory tp_trajectory;
typedef struct tp_scan_result tp_scan_result;

TP_API const char* tp_version(void);
TP_API const char* tp_last_error(void);
TP_API const char* tp_status_string(tp_status s);

TP_API tp_integrator tp_integrator_default(void);
TP_API tp_variant tp_variant_default(void);
TP_API tp_scan_options tp_scan_options_default(void);

TP_API tp_status tp_params_gamma(const tp_params* p, double* Gamma);

TP_API tp_status tp_schedule_constant(double omega, double theta, tp_schedule** out);
TP_API tp_status tp_schedule_ramp(double omega, double duration, tp_schedule** out);
TP_API tp_status tp_schedule_piecewise(double omega, const double* t, const double* theta, size_t n,
                                       tp_schedule** out);
TP_API tp_status tp_schedule_theta(const tp_schedule* s, double t, double* theta);
TP_API tp_status tp_schedule_omega(const tp_schedule* s, double* omega);
TP_API void tp_schedule_free(tp_schedule* s);

/* Amplitudes in basis order |1>, |0>, |-1>, |e>. */
TP_API tp_status tp_dark_state(double theta, double t, double omega, int branch, double re[4],
                               double im[4]);
TP_API tp_status tp_stokes(const tp_schedule* s, double t, double out[3]);
TP_API tp_status tp_gb_to_larmor(double B_gauss, double* omega_B);

/* times: strictly increasing sample grid; integration starts at times[0]. */
TP_API tp_status tp_run_master(const tp_params* p, const tp_schedule* s, const tp_integrator* cfg,
                               int initial_state, const double* times, size_t n,
                               tp_trajectory** out);
TP_API tp_status tp_run_bloch(const tp_params* p, const tp_schedule* s, const tp_integrator* cfg,
                              const tp_variant* v, int initial_state, const double* times, size_t n,
                              tp_trajectory** out);
/* times may be NULL for 401 samples on [0, T]. prepump <= 0 means 5 / Gamma. */
TP_API tp_status tp_run_passage(double T, const tp_params* p, double omega, int engine,
                                const tp_variant* v, const tp_integrator* cfg, int init,
                                double prepump, const double* times, size_t n,
                                tp_trajectory** out);

TP_API size_t tp_trajectory_size(const tp_trajectory* tr);
TP_API int tp_trajectory_engine(const tp_trajectory* tr);
TP_API tp_status tp_trajectory_sample(const tp_trajectory* tr, size_t i, tp_sample* out);
TP_API tp_status tp_trajectory_stats(const tp_trajectory* tr, tp_run_stats* out);
/* Row-major 4x4 density matrix at sample i (master runs only). */
TP_API tp_status tp_trajectory_state(const tp_trajectory* tr, size_t i, double re[16],
                                     double im[16]);
TP_API void tp_trajectory_free(tp_trajectory* tr);

TP_API tp_status tp_excited_state_check(const tp_trajectory* tr, const tp_params* p,
                                        const tp_schedule* s, double t_settle,
                                        tp_excited_report* out);

/* The schedule's profile is kept for omega scans; theta scans keep only omega. */
TP_API tp_status tp_scan(const tp_params* p, const tp_schedule* s, const tp_integrator* cfg,
                         const tp_scan_options* opts, const double* grid, size_t n,
                         tp_scan_result** out);
TP_API size_t tp_scan_size(const tp_scan_result* r);
TP_API tp_status tp_scan_point(const tp_scan_result* r, size_t i, double* value, double* fz,
                               double* t_read, int* ok);
TP_API const char* tp_scan_point_error(const tp_scan_result* r, size_t i);
TP_API size_t tp_scan_extrema_count(const tp_scan_result* r);
TP_API tp_status tp_scan_extremum(const tp_scan_result* r, size_t i, tp_extremum* out);
/* TP_ERR_OUT_OF_RANGE when every point failed. */
TP_API tp_status tp_scan_peak(const tp_scan_result* r, tp_extremum* out);
TP_API void tp_scan_free(tp_scan_result* r);

/* master_out / bloch_out may be NULL. */
TP_API tp_status tp_compare(const tp_params* p, const tp_schedule* s, const tp_integrator* cfg,
                            const tp_variant* v, int initial_state, double t_end, size_t samples,
                            tp_compare_report* out, tp_trajectory** master_out,
                            tp_trajectory** bloch_out);

TP_API tp_status tp_resolve_sign_standard(const tp_integrator* cfg, tp_sign_report* out);
/* times may be NULL for 501 samples on [0, 50 / Gamma]. */
TP_API tp_status tp_resolve_sign(const tp_params* p, const tp_schedule* s, const tp_integrator* cfg,
                                 const double* times, size_t n, tp_sign_report* out);

/* index in [0, tp_preset_count()) */
TP_API size_t tp_preset_count(void);
TP_API const char* tp_preset_name(size_t index);
TP_API tp_status tp_preset_get(const char* name, tp_preset* out);
TP_API tp_status tp_preset_scan_grid(const char* name, double* grid, size_t capacity);

#ifdef __cplusplus
}
#endif

#endif
