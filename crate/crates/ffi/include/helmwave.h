#ifndef HELMWAVE_H
#define HELMWAVE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result code of every fallible call.
 */
typedef enum HwStatus {
  HW_STATUS_OK = 0,
  HW_STATUS_NULL_POINTER = 1,
  HW_STATUS_INVALID_ARGUMENT = 2,
  HW_STATUS_CFL_VIOLATION = 3,
  HW_STATUS_NUMERICAL_ERROR = 4,
  HW_STATUS_BUFFER_TOO_SMALL = 5,
  HW_STATUS_PANIC = 6,
} HwStatus;

/*
 Opaque problem handle.
 */
typedef struct HwProblem HwProblem;

/*
 Opaque handle holding a finished run.
 */
typedef struct HwRun HwRun;

/*
 Run parameters; obtain defaults from `hw_run_params_default`.
 */
typedef struct HwRunParams {
  /*
   Characteristic speeds, two positive then two negative.
   */
  double lambda[4];
  size_t n_x;
  /*
   Number of time steps; 0 selects CFL = 1.
   */
  size_t n_t;
  double t_final;
  size_t quadrature_order;
  bool allow_cfl_violation;
  bool early_stop;
  double steady_tol;
  bool fast_expm;
} HwRunParams;

/*
 Real-valued source callback `f(x, user_data)`.
 */
typedef double (*HwSourceFn)(double x, void *user_data);

/*
 Error norms of a plane-wave run. Relative norms are NaN when undefined.
 */
typedef struct HwErrorReport {
  double l2_abs[4];
  double linf_abs[4];
  double l2_rel[4];
  double linf_rel[4];
  /*
   Group maxima: index 0 is `(u_R, u_I)`, index 1 is `(v_R, v_I)`.
   */
  double group_l2_rel[2];
  double group_linf_rel[2];
  size_t steps;
  bool fast_expm;
} HwErrorReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Default parameters: unit speeds, `N_x = 10`, CFL = 1, `T = 2`.
 */
struct HwRunParams hw_run_params_default(void);

/*
 Creates a problem with wavenumber `k`, boundary data `g0 = g0r + i g0i`,
 `g1 = g1r + i g1i` and source `f = f_re + i f_im`. Null callbacks mean zero.
 */
enum HwStatus hw_problem_new(double k,
                             double g0r,
                             double g0i,
                             double g1r,
                             double g1i,
                             HwSourceFn f_re,
                             HwSourceFn f_im,
                             void *user_data,
                             struct HwProblem **out);

void hw_problem_free(struct HwProblem *problem);

/*
 Marches `problem` from a zero initial field.
 */
enum HwStatus hw_run(const struct HwProblem *problem,
                     const struct HwRunParams *params,
                     struct HwRun **out);

void hw_run_free(struct HwRun *run);

/*
 Number of mesh nodes, or 0 for a null handle.
 */
size_t hw_run_n_nodes(const struct HwRun *run);

/*
 Number of time steps executed, or 0 for a null handle.
 */
size_t hw_run_steps(const struct HwRun *run);

/*
 Copies the Riemann variables, 4 values per node, into `buf` (`len >= 4 * n_nodes`).
 */
enum HwStatus hw_run_copy_riemann(const struct HwRun *run, double *buf, size_t len);

/*
 Copies `(u_R, u_I, v_R, v_I)` per node into `buf` (`len >= 4 * n_nodes`).
 */
enum HwStatus hw_run_copy_primitive(const struct HwRun *run, double *buf, size_t len);

/*
 Copies the residual history into `buf`; `written` receives its length.
 */
enum HwStatus hw_run_copy_residuals(const struct HwRun *run,
                                    double *buf,
                                    size_t len,
                                    size_t *written);

/*
 Solves the plane-wave test case `u = e^{ikx}` and reports its error norms.
 */
enum HwStatus hw_plane_wave_report(double k,
                                   const struct HwRunParams *params,
                                   struct HwErrorReport *out);

/*
 Matrix exponential of a row-major 4×4 matrix.
 */
enum HwStatus hw_expm(const double *input, double *output);

/*
 Static, NUL-terminated description of `status`.
 */
const char *hw_status_message(enum HwStatus status);

/*
 Library version as a static, NUL-terminated string.
 */
const char *hw_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HELMWAVE_H */
