#ifndef PORTDEC_H
#define PORTDEC_H

/* Generated by cbindgen from portdec-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible function.
 */
typedef enum PdStatus {
  PD_STATUS_OK = 0,
  PD_STATUS_NULL_ARGUMENT = 1,
  PD_STATUS_INVALID_ARGUMENT = 2,
  PD_STATUS_UTF8 = 3,
  PD_STATUS_PARSE = 4,
  PD_STATUS_MESH = 5,
  PD_STATUS_MODEL = 6,
  PD_STATUS_SIM = 7,
} PdStatus;

/**
 * Material profile for the telegraph constructors.
 */
typedef enum PdMaterial {
  /**
   * Constant value.
   */
  PD_MATERIAL_CONSTANT = 0,
  /**
   * The benchmark profile 1 / (1 + z); the value argument is ignored.
   */
  PD_MATERIAL_PAPER_LINE = 1,
} PdMaterial;

/**
 * Kind tag for `pd_model_set_signal`.
 */
typedef enum PdSignal {
  PD_SIGNAL_ZERO = 0,
  /**
   * value = a
   */
  PD_SIGNAL_CONSTANT = 1,
  /**
   * a * sin(b t), zero before t = 0
   */
  PD_SIGNAL_SINE = 2,
  /**
   * a for t >= b
   */
  PD_SIGNAL_STEP = 3,
  /**
   * output-feedback load of resistance a
   */
  PD_SIGNAL_LOAD = 4,
} PdSignal;

/**
 * A validated simplicial complex with its circumcentric dual and operator
 * set.
 */
typedef struct PdMesh PdMesh;

/**
 * A port-Hamiltonian model plus its boundary port wiring.
 */
typedef struct PdModel PdModel;

/**
 * A recorded simulation run.
 */
typedef struct PdTrajectory PdTrajectory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *pd_last_error_message(void);

/**
 * Library version as a static C string.
 */
const char *pd_version(void);

/**
 * Build the uniform 1D chain on [a, b] with `n_cells` edges.
 */
enum PdStatus pd_mesh_uniform_interval(double a, double b, uintptr_t n_cells, struct PdMesh **out);

/**
 * Parse a mesh from its JSON document
 * `{ "dim": n, "vertices": [[x, ...]], "simplices": [[i0, ..., in]] }`.
 */
enum PdStatus pd_mesh_from_json(const char *text, struct PdMesh **out);

void pd_mesh_free(struct PdMesh *mesh);

/**
 * Complex dimension n.
 */
enum PdStatus pd_mesh_dim(const struct PdMesh *mesh, uintptr_t *out);

/**
 * Number of k-simplices.
 */
enum PdStatus pd_mesh_count(const struct PdMesh *mesh, uintptr_t k, uintptr_t *out);

/**
 * Number of boundary k-simplices.
 */
enum PdStatus pd_mesh_boundary_count(const struct PdMesh *mesh, uintptr_t k, uintptr_t *out);

/**
 * 1 when every simplex contains its circumcenter strictly inside.
 */
enum PdStatus pd_mesh_well_centered(const struct PdMesh *mesh, int32_t *out);

/**
 * Telegraph line on a 1D mesh with distributed capacitance and inductance.
 */
enum PdStatus pd_model_telegraph(const struct PdMesh *mesh,
                                 enum PdMaterial capacitance,
                                 double capacitance_value,
                                 enum PdMaterial inductance,
                                 double inductance_value,
                                 struct PdModel **out);

/**
 * Normalized 2D wave equation on a well-centered 2D mesh.
 */
enum PdStatus pd_model_wave2d(const struct PdMesh *mesh, struct PdModel **out);

/**
 * Diffusion with resistive port termination (R >= 0).
 */
enum PdStatus pd_model_diffusion(const struct PdMesh *mesh, double r, struct PdModel **out);

/**
 * Vacuum Maxwell equations on a well-centered 3D mesh.
 */
enum PdStatus pd_model_maxwell(const struct PdMesh *mesh,
                               double epsilon,
                               double mu,
                               struct PdModel **out);

void pd_model_free(struct PdModel *model);

/**
 * Dimension of the stacked state vector.
 */
enum PdStatus pd_model_state_dim(const struct PdModel *model, uintptr_t *out);

/**
 * Number of boundary ports.
 */
enum PdStatus pd_model_port_count(const struct PdModel *model, uintptr_t *out);

/**
 * Wire a boundary port with a signal; parameters a and b depend on the
 * signal kind.
 */
enum PdStatus pd_model_set_signal(struct PdModel *model,
                                  uintptr_t port,
                                  enum PdSignal kind,
                                  double a,
                                  double b);

/**
 * Quadratic Hamiltonian of a state vector.
 */
enum PdStatus pd_model_hamiltonian(const struct PdModel *model,
                                   const double *state,
                                   uintptr_t len,
                                   double *out);

/**
 * Verify the model's Dirac structure: isotropy of random structure
 * elements and the dimension bookkeeping.
 */
enum PdStatus pd_dirac_verify(const struct PdModel *model,
                              uintptr_t trials,
                              uint64_t seed,
                              double *max_residual,
                              int32_t *pass);

/**
 * Integrate with RK4. `initial` may be null for the zero state.
 */
enum PdStatus pd_simulate(const struct PdModel *model,
                          double dt,
                          double t_final,
                          const double *initial,
                          uintptr_t initial_len,
                          struct PdTrajectory **out);

void pd_trajectory_free(struct PdTrajectory *traj);

/**
 * Number of recorded time steps (including t = 0).
 */
enum PdStatus pd_trajectory_len(const struct PdTrajectory *traj, uintptr_t *out);

/**
 * Copy the time grid into `buf` (capacity `len`).
 */
enum PdStatus pd_trajectory_times(const struct PdTrajectory *traj, double *buf, uintptr_t len);

/**
 * Copy the Hamiltonian series into `buf`.
 */
enum PdStatus pd_trajectory_hamiltonian(const struct PdTrajectory *traj,
                                        double *buf,
                                        uintptr_t len);

/**
 * Copy the boundary power series into `buf`.
 */
enum PdStatus pd_trajectory_boundary_power(const struct PdTrajectory *traj,
                                           double *buf,
                                           uintptr_t len);

/**
 * Copy the RK4-integrated cumulative boundary energy inflow into `buf`.
 */
enum PdStatus pd_trajectory_energy_inflow(const struct PdTrajectory *traj,
                                          double *buf,
                                          uintptr_t len);

/**
 * Copy the state at one recorded step into `buf`.
 */
enum PdStatus pd_trajectory_state(const struct PdTrajectory *traj,
                                  uintptr_t step,
                                  double *buf,
                                  uintptr_t len);

/**
 * Exact benchmark voltage u(t - ln(z+1)) with u = sin, causal.
 */
enum PdStatus pd_exact_telegraph_sine(double t, double z, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PORTDEC_H */
