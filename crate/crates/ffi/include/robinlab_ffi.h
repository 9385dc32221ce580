#ifndef ROBINLAB_FFI_H
#define ROBINLAB_FFI_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes. `ROBIN_STATUS_OK` is zero; everything else is a failure.
typedef enum RobinStatus {
  ROBIN_STATUS_OK = 0,
  // A required pointer argument was null.
  ROBIN_STATUS_NULL_POINTER = 1,
  // Parameter outside the supported range (bad κ, n, radius, α > 0, ...).
  ROBIN_STATUS_INVALID_ARGUMENT = 2,
  // Root bracketing, integration or an eigen solver failed.
  ROBIN_STATUS_NUMERICAL = 3,
  // Mesh construction or validation failed.
  ROBIN_STATUS_MESH = 4,
  // File could not be read, written or parsed.
  ROBIN_STATUS_IO = 5,
  // Caller buffer is too small.
  ROBIN_STATUS_BUFFER_TOO_SMALL = 6,
  // Internal panic caught at the boundary.
  ROBIN_STATUS_INTERNAL = 7,
} RobinStatus;

// Opaque triangulated domain in the conformal disk model.
typedef struct RobinMesh RobinMesh;

// Summary of the chain `λ₂(Ω) ≤ Q_rayleigh ≤ Q_potential ≤ Q_ball = λ₂(Ω*)`.
typedef struct RobinChain {
  double volume;
  double radius_star;
  double sigma1_star;
  double lambda2_omega;
  double rayleigh_bound;
  double potential_bound;
  double ball_bound;
  double lambda2_ball;
  double slack;
  double mesh_error_bound;
  double center_x;
  double center_y;
  // 0 pass, 1 fail, 2 hypotheses not met.
  int32_t verdict;
} RobinChain;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failure on this thread, or an empty string.
// The pointer stays valid until the next call into this library on the
// same thread.
const char *robinlab_last_error(void);

// Library version as a static NUL-terminated string.
const char *robinlab_version(void);

// `sn_κ(t)`.
//
// # Safety
// `out` must be null or valid for writes.
enum RobinStatus robinlab_sn(double kappa, double t, double *out);

// `sn_κ'(t)`.
//
// # Safety
// `out` must be null or valid for writes.
enum RobinStatus robinlab_sn_prime(double kappa, double t, double *out);

// Volume of the geodesic ball of radius `radius` in the `dim`-dimensional
// space form of curvature `kappa`.
//
// # Safety
// `out` must be null or valid for writes.
enum RobinStatus robinlab_ball_volume(double kappa, uint32_t dim, double radius, double *out);

// Radius of the geodesic ball with the given volume.
//
// # Safety
// `out` must be null or valid for writes.
enum RobinStatus robinlab_radius_for_volume(double kappa, uint32_t dim, double volume, double *out);

// First Robin eigenvalue of the geodesic ball in angular sector `l`
// (0 radial, 1 dipole). Sector 1 gives `λ₂`.
//
// # Safety
// `out` must be null or valid for writes.
enum RobinStatus robinlab_ball_robin_eigenvalue(double kappa,
                                                uint32_t dim,
                                                double radius,
                                                double alpha,
                                                uint32_t l,
                                                double *out);

// First nonzero Steklov eigenvalue of the geodesic ball.
//
// # Safety
// `out` must be null or valid for writes.
enum RobinStatus robinlab_ball_steklov(double kappa, uint32_t dim, double radius, double *out);

// Geodesic disk of radius `radius` centered at the origin, target edge `h`.
//
// # Safety
// `out` must be null or valid for writes. The handle must be released with
// [`robinlab_mesh_free`].
enum RobinStatus robinlab_mesh_disk(double kappa, double radius, double h, struct RobinMesh **out);

// Ellipse with semi-axes `a`, `b` in disk-model coordinates.
//
// # Safety
// As for [`robinlab_mesh_disk`].
enum RobinStatus robinlab_mesh_ellipse(double kappa,
                                       double a,
                                       double b,
                                       double h,
                                       struct RobinMesh **out);

// Axis-aligned `w × l` rectangle centered at the origin.
//
// # Safety
// As for [`robinlab_mesh_disk`].
enum RobinStatus robinlab_mesh_rectangle(double kappa,
                                         double w,
                                         double l,
                                         double h,
                                         struct RobinMesh **out);

// Star-shaped domain with boundary radius `radius (1 + eps cos kθ)`.
//
// # Safety
// As for [`robinlab_mesh_disk`].
enum RobinStatus robinlab_mesh_perturbed_disk(double kappa,
                                              double radius,
                                              double eps,
                                              uint32_t k,
                                              double h,
                                              struct RobinMesh **out);

// Reads a mesh in the text format written by [`robinlab_mesh_write`].
//
// # Safety
// `path` must be a NUL-terminated string; `out` as for [`robinlab_mesh_disk`].
enum RobinStatus robinlab_mesh_read(const char *path, struct RobinMesh **out);

// # Safety
// `mesh` must be a live handle; `path` a NUL-terminated string.
enum RobinStatus robinlab_mesh_write(const struct RobinMesh *mesh, const char *path);

// One uniform red refinement into a new handle.
//
// # Safety
// `mesh` must be a live handle; `out` as for [`robinlab_mesh_disk`].
enum RobinStatus robinlab_mesh_refine(const struct RobinMesh *mesh, struct RobinMesh **out);

// Releases a handle. Null is ignored.
//
// # Safety
// `mesh` must be null or a handle not yet freed.
void robinlab_mesh_free(struct RobinMesh *mesh);

// Vertex and triangle counts.
//
// # Safety
// `mesh` must be a live handle; the out-pointers null or writable.
enum RobinStatus robinlab_mesh_size(const struct RobinMesh *mesh,
                                    size_t *vertices,
                                    size_t *triangles);

// Metric area of the meshed domain.
//
// # Safety
// `mesh` must be a live handle; `out` null or writable.
enum RobinStatus robinlab_mesh_volume(const struct RobinMesh *mesh, double *out);

// Smallest `k` Robin eigenvalues of the meshed domain, ascending, written
// to `out[0..k]`.
//
// # Safety
// `mesh` must be a live handle; `out` must hold `k` doubles.
enum RobinStatus robinlab_fem_robin(const struct RobinMesh *mesh,
                                    double alpha,
                                    size_t k,
                                    double *out);

// Smallest `k` nonzero Steklov eigenvalues, ascending.
//
// # Safety
// `mesh` must be a live handle; `out` must hold `k` doubles.
enum RobinStatus robinlab_fem_steklov(const struct RobinMesh *mesh, size_t k, double *out);

// Evaluates the comparison chain on the meshed domain.
//
// # Safety
// `mesh` must be a live handle; `out` null or writable.
enum RobinStatus robinlab_chain(const struct RobinMesh *mesh, double alpha, struct RobinChain *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ROBINLAB_FFI_H */
