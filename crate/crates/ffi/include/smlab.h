/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef SMLAB_H
#define SMLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SmlabStatus {
  SMLAB_STATUS_OK = 0,
  SMLAB_STATUS_NULL_POINTER = 1,
  SMLAB_STATUS_INVALID_ARGUMENT = 2,
  SMLAB_STATUS_INVALID_GRID = 3,
  /**
   * Data too large: the sup norm reached 1 or the smallness gate failed.
   */
  SMLAB_STATUS_INADMISSIBLE = 4,
  /**
   * Grids of two arguments disagree.
   */
  SMLAB_STATUS_MISMATCH = 5,
  SMLAB_STATUS_INTERNAL = 6,
} SmlabStatus;

typedef enum SmlabOutcome {
  SMLAB_OUTCOME_CONVERGED = 0,
  SMLAB_OUTCOME_MAX_ITERATIONS = 1,
  SMLAB_OUTCOME_DIVERGED = 2,
} SmlabOutcome;

/**
 * Complex field on the spatial part of a grid.
 */
typedef struct SmlabField SmlabField;

/**
 * Space-time grid: dimension n, M spatial points per axis, K time points.
 */
typedef struct SmlabGrid SmlabGrid;

/**
 * Result of a Picard solve.
 */
typedef struct SmlabSolution SmlabSolution;

/**
 * Solver settings. Obtain defaults from `smlab_solver_config_default`.
 */
typedef struct SmlabSolverConfig {
  double s;
  double t_horizon;
  double ramp;
  size_t k_max;
  double tol;
  size_t series_order;
  bool exact_q;
  /**
   * Use the σ = +1 nonlinearity instead of the energy-conserving one.
   */
  bool printed_sign;
} SmlabSolverConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static description of a status code.
 */
const char *smlab_status_message(enum SmlabStatus status);

/**
 * Library version as a static NUL-terminated string.
 */
const char *smlab_version(void);

/**
 * Create a grid.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle. On
 * success the handle must be released with `smlab_grid_free`.
 */
enum SmlabStatus smlab_grid_new(size_t n, size_t m, size_t k, struct SmlabGrid **out);

/**
 * Release a grid. Null is ignored.
 *
 * # Safety
 * `grid` must be null or a handle from `smlab_grid_new` not yet freed.
 */
void smlab_grid_free(struct SmlabGrid *grid);

/**
 * Number of spatial points, M^n; the length of field value arrays.
 *
 * # Safety
 * `grid` must be a live grid handle; `out` must be writable.
 */
enum SmlabStatus smlab_grid_spatial_len(const struct SmlabGrid *grid, size_t *out);

/**
 * Field from point values in row-major order (last axis fastest).
 *
 * # Safety
 * `grid` must be a live grid handle. `re` and `im` must each point to
 * `len` readable doubles. `out` must be writable; the handle it receives
 * must be released with `smlab_field_free`.
 */
enum SmlabStatus smlab_field_new(const struct SmlabGrid *grid,
                                 const double *re,
                                 const double *im,
                                 size_t len,
                                 struct SmlabField **out);

/**
 * The plane wave amplitude·e^{i x·ξ}.
 *
 * # Safety
 * `grid` must be a live grid handle, `xi` must point to `n` readable
 * integers with `n` the grid dimension, and `out` must be writable.
 */
enum SmlabStatus smlab_field_plane_wave(const struct SmlabGrid *grid,
                                        const int64_t *xi,
                                        size_t n,
                                        double amplitude,
                                        struct SmlabField **out);

/**
 * Release a field. Null is ignored.
 *
 * # Safety
 * `field` must be null or a field handle not yet freed.
 */
void smlab_field_free(struct SmlabField *field);

/**
 * ‖f‖_{H^s}.
 *
 * # Safety
 * `field` must be a live field handle and `out` writable.
 */
enum SmlabStatus smlab_field_hs_norm(const struct SmlabField *field, double s, double *out);

/**
 * Map energy ½∫|∇z|²/(1+|z|²)² dx.
 *
 * # Safety
 * `field` must be a live field handle and `out` writable.
 */
enum SmlabStatus smlab_field_energy(const struct SmlabField *field, double *out);

struct SmlabSolverConfig smlab_solver_config_default(void);

/**
 * Solve with data `u0` on the space-time grid `grid`. A run that stops
 * without converging still returns a solution; inspect its outcome.
 *
 * # Safety
 * `u0` and `grid` must be live handles, `cfg` must point to a readable
 * config and `out` must be writable. The solution must be released with
 * `smlab_solution_free`.
 */
enum SmlabStatus smlab_solve(const struct SmlabField *u0,
                             const struct SmlabGrid *grid,
                             const struct SmlabSolverConfig *cfg,
                             struct SmlabSolution **out);

/**
 * Release a solution. Null is ignored.
 *
 * # Safety
 * `sol` must be null or a solution handle not yet freed.
 */
void smlab_solution_free(struct SmlabSolution *sol);

/**
 * How the iteration ended.
 *
 * # Safety
 * `sol` must be a live solution handle and `out` writable.
 */
enum SmlabStatus smlab_solution_outcome(const struct SmlabSolution *sol, enum SmlabOutcome *out);

/**
 * Number of recorded iterations.
 *
 * # Safety
 * `sol` must be a live solution handle and `out` writable.
 */
enum SmlabStatus smlab_solution_iterations(const struct SmlabSolution *sol, size_t *out);

/**
 * sup_t ‖u_k − u_{k−1}‖_{H^s} of iteration `index` (0-based).
 *
 * # Safety
 * `sol` must be a live solution handle and `out` writable.
 */
enum SmlabStatus smlab_solution_difference(const struct SmlabSolution *sol,
                                           size_t index,
                                           double *out);

/**
 * Residual of the truncated equation; NaN after divergence.
 *
 * # Safety
 * `sol` must be a live solution handle and `out` writable.
 */
enum SmlabStatus smlab_solution_residual(const struct SmlabSolution *sol, double *out);

/**
 * Energy drift over |t| ≤ t_horizon. `relative` receives NaN when the
 * initial energy is zero.
 *
 * # Safety
 * `sol` must be a live solution handle; `absolute` and `relative` must be
 * writable.
 */
enum SmlabStatus smlab_solution_energy_drift(const struct SmlabSolution *sol,
                                             double *absolute,
                                             double *relative);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SMLAB_H */
