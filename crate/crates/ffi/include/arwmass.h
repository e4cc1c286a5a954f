#ifndef ARWMASS_H
#define ARWMASS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ArwStatus {
  ARW_STATUS_OK = 0,
  ARW_STATUS_NULL_POINTER = 1,
  ARW_STATUS_INVALID_UTF8 = 2,
  ARW_STATUS_PARSE = 3,
  ARW_STATUS_INVALID_SPEC = 4,
  ARW_STATUS_INVALID_ARGUMENT = 5,
  ARW_STATUS_UNSUPPORTED = 6,
  ARW_STATUS_NUMERICAL = 7,
  ARW_STATUS_INDEX_OUT_OF_RANGE = 8,
  ARW_STATUS_PANIC = 9,
} ArwStatus;

/**
 * Samples and extrapolated limit of the mass integral.
 */
typedef struct ArwMassReport ArwMassReport;

/**
 * An ARW spacetime.
 */
typedef struct ArwSpec ArwSpec;

/**
 * An inverse mean curvature flow trajectory.
 */
typedef struct ArwTrajectory ArwTrajectory;

typedef struct ArwSlabBalance {
  double tau1;
  double tau2;
  double b1;
  double b2;
  double volume;
  double residual;
} ArwSlabBalance;

typedef struct ArwFlowState {
  double t;
  double u;
  double mean_curvature;
  double f_of_u;
  double dfdt;
} ArwFlowState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null after a
 * success. Valid until the next call on the same thread.
 */
const char *arw_last_error(void);

/**
 * Library version as a static string.
 */
const char *arw_version(void);

/**
 * The family `f = (1/γ̃) log(−kτ)` on `[a, 0) × S^n`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage.
 */
enum ArwStatus arw_spec_rw_family(size_t n, double omega, double k, double a, struct ArwSpec **out);

/**
 * A spec from expressions: `f` in `tau`, `psi` and `lambda` in `tau`, `theta`.
 *
 * # Safety
 * String arguments must be nul-terminated; `out` must be writable.
 */
enum ArwStatus arw_spec_custom(size_t n,
                               double omega,
                               const char *f,
                               const char *psi,
                               const char *lambda,
                               double a,
                               struct ArwSpec **out);

/**
 * The Schwarzschild–anti-de Sitter brane in its ARW presentation.
 *
 * # Safety
 * `out` must be writable.
 */
enum ArwStatus arw_spec_sads(size_t n, double lambda, double mass, struct ArwSpec **out);

/**
 * # Safety
 * `spec` must come from an `arw_spec_*` constructor and not be used after.
 */
void arw_spec_free(struct ArwSpec *spec);

/**
 * Start `a` of the time domain `[a, 0)`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum ArwStatus arw_spec_domain_start(const struct ArwSpec *spec, double *out);

/**
 * `I(τ)` over the coordinate slice with `nodes` Gauss–Legendre nodes per axis.
 *
 * # Safety
 * Pointers must be valid.
 */
enum ArwStatus arw_slice_mass_integral(const struct ArwSpec *spec,
                                       double tau,
                                       size_t nodes,
                                       double *out);

/**
 * Mass limit on the schedule `a·2^{−k}`, `k = 0..=count`.
 *
 * # Safety
 * Pointers must be valid; release the report with [`arw_mass_report_free`].
 */
enum ArwStatus arw_mass_limit(const struct ArwSpec *spec,
                              size_t nodes,
                              size_t count,
                              struct ArwMassReport **out);

/**
 * # Safety
 * `report` must come from [`arw_mass_limit`] and not be used after.
 */
void arw_mass_report_free(struct ArwMassReport *report);

/**
 * Recovered mass, extrapolation error and monotone flag.
 *
 * # Safety
 * Pointers must be valid; any output may be null to skip it.
 */
enum ArwStatus arw_mass_report_summary(const struct ArwMassReport *report,
                                       double *m_hat,
                                       double *error,
                                       bool *monotone);

/**
 * Number of samples in the report.
 *
 * # Safety
 * Pointers must be valid.
 */
enum ArwStatus arw_mass_report_len(const struct ArwMassReport *report, size_t *out);

/**
 * Sample `index`: slice time and integral.
 *
 * # Safety
 * Pointers must be valid.
 */
enum ArwStatus arw_mass_report_sample(const struct ArwMassReport *report,
                                      size_t index,
                                      double *tau,
                                      double *integral);

/**
 * Divergence-theorem balance over `[tau1, tau2]`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum ArwStatus arw_slab_balance(const struct ArwSpec *spec,
                                double tau1,
                                double tau2,
                                size_t nodes,
                                struct ArwSlabBalance *out);

/**
 * Inverse mean curvature flow of the slice `{τ = u0}` up to `t_end`.
 *
 * # Safety
 * Pointers must be valid; release with [`arw_trajectory_free`].
 */
enum ArwStatus arw_imcf_run(const struct ArwSpec *spec,
                            double u0,
                            double t_end,
                            double tolerance,
                            struct ArwTrajectory **out);

/**
 * # Safety
 * `trajectory` must come from [`arw_imcf_run`] and not be used after.
 */
void arw_trajectory_free(struct ArwTrajectory *trajectory);

/**
 * Number of accepted states.
 *
 * # Safety
 * Pointers must be valid.
 */
enum ArwStatus arw_trajectory_len(const struct ArwTrajectory *trajectory, size_t *out);

/**
 * State `index` of the trajectory.
 *
 * # Safety
 * Pointers must be valid.
 */
enum ArwStatus arw_trajectory_state(const struct ArwTrajectory *trajectory,
                                    size_t index,
                                    struct ArwFlowState *out);

/**
 * Whether the flow stopped at the singularity before `t_end`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum ArwStatus arw_trajectory_reached_singularity(const struct ArwTrajectory *trajectory,
                                                  bool *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ARWMASS_H */
