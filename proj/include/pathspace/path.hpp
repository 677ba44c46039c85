#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "pathspace/geometry.hpp"
#include "pathspace/rng.hpp"

namespace pathspace {

// Number of grid steps for a duration that must sit on the dt-grid.
inline int grid_steps(double T, double dt, double tol = 1e-9) {
  int n = static_cast<int>(std::llround(T / dt));
  if (std::abs(n * dt - T) > tol) throw GeometryError("duration is not a multiple of dt");
  return n;
}

// Geodesic random walk with frame transport: at each step draw an increment
// dbeta ~ N(0, dt I_n) in frame coordinates, move along exp(x, U dbeta), and
// carry the frame by parallel transport along the step geodesic (re-orthonormalized).
struct FramedPath {
  Manifold manifold = Manifold::euclidean(1);
  double dt = 0.0;
  std::vector<Vec> points;      // N+1 grid points
  std::vector<Mat> frames;      // N+1 orthonormal frames
  std::vector<Vec> increments;  // N increments in R^dim

  int steps() const { return static_cast<int>(increments.size()); }
  double horizon() const { return steps() * dt; }
  double time(int k) const { return k * dt; }
  int node_at(double t) const { return grid_steps(t, dt); }

  void clear() {
    points.clear();
    frames.clear();
    increments.clear();
  }
};

inline void bm_step(const Manifold& M, const Vec& x, const Mat& U, const Vec& dbeta, Vec& x_out,
                    Mat& U_out) {
  Vec v = U * dbeta;
  x_out = M.exp(x, v);
  U_out.resize(U.rows(), U.cols());
  for (int c = 0; c < U.cols(); ++c) U_out.col(c) = M.transport(x, x_out, U.col(c));
  M.orthonormalize(x_out, U_out);
}

// Streaming walk; visitor sees (k, point, frame) for k = 0..N, with the k-th
// increment available to the caller through the path it chooses to record.
template <class Visitor>
void walk_bm(const Manifold& M, Vec x, Mat U, double T, double dt, RngStream& rng, Visitor&& vis) {
  int N = grid_steps(T, dt);
  double sd = std::sqrt(dt);
  vis(0, x, U, Vec(Vec::Zero(M.dim())));
  Vec x_next;
  Mat U_next;
  for (int k = 0; k < N; ++k) {
    Vec dbeta = rng.normal_vec(M.dim(), sd);
    bm_step(M, x, U, dbeta, x_next, U_next);
    x = x_next;
    U = U_next;
    vis(k + 1, x, U, dbeta);
  }
}

inline void sample_bm_into(FramedPath& out, const Manifold& M, const Vec& x0, const Mat& U0,
                           double T, double dt, RngStream& rng) {
  out.manifold = M;
  out.dt = dt;
  out.clear();
  int N = grid_steps(T, dt);
  out.points.reserve(N + 1);
  out.frames.reserve(N + 1);
  out.increments.reserve(N);
  walk_bm(M, x0, U0, T, dt, rng, [&](int k, const Vec& x, const Mat& U, const Vec& db) {
    out.points.push_back(x);
    out.frames.push_back(U);
    if (k > 0) out.increments.push_back(db);
  });
}

inline FramedPath sample_bm(const Manifold& M, const Vec& x0, const Mat& U0, double T, double dt,
                            RngStream& rng) {
  FramedPath p;
  sample_bm_into(p, M, x0, U0, T, dt, rng);
  return p;
}

// Two independent geodesic walks glued at time 0; both legs develop from the
// same initial frame. Negative times index the backward leg.
struct TwoSidedPath {
  FramedPath fwd;
  FramedPath bwd;

  const Vec& point_at(double t) const {
    return t >= 0 ? fwd.points[fwd.node_at(t)] : bwd.points[bwd.node_at(-t)];
  }
  const Mat& frame_at(double t) const {
    return t >= 0 ? fwd.frames[fwd.node_at(t)] : bwd.frames[bwd.node_at(-t)];
  }
};

inline TwoSidedPath sample_two_sided(const Manifold& M, const Vec& x0, const Mat& U0, double T_fwd,
                                     double T_bwd, double dt, RngStream& rng) {
  TwoSidedPath p;
  sample_bm_into(p.fwd, M, x0, U0, T_fwd, dt, rng);
  sample_bm_into(p.bwd, M, x0, U0, T_bwd, dt, rng);
  return p;
}

// Initial distributions for the start point.
struct NuSpec {
  enum class Kind { PointMass, UniformSphere, TruncatedLebesgue };
  Kind kind = Kind::PointMass;
  Vec point;      // PointMass anchor (also the chart origin for TruncatedLebesgue)
  double radius = 1.0;

  static NuSpec point_mass(Vec p) {
    NuSpec s;
    s.kind = Kind::PointMass;
    s.point = std::move(p);
    return s;
  }
  static NuSpec uniform_sphere() {
    NuSpec s;
    s.kind = Kind::UniformSphere;
    return s;
  }
  static NuSpec truncated_lebesgue(Vec center, double R) {
    NuSpec s;
    s.kind = Kind::TruncatedLebesgue;
    s.point = std::move(center);
    s.radius = R;
    return s;
  }
};

Vec sample_nu(const NuSpec& nu, const Manifold& M, RngStream& rng);
// Density w.r.t. the manifold volume measure (UniformSphere normalized, the
// truncated Lebesgue case unnormalized with total_mass recorded separately);
// PointMass reports density w.r.t. its own measure: 1 at the anchor, else 0.
double nu_density(const NuSpec& nu, const Manifold& M, const Vec& y);
double nu_total_mass(const NuSpec& nu, const Manifold& M);

// Matrix exponential of a symmetric matrix (eigendecomposition).
Mat sym_expm(const Mat& S);

// Damping transports along a framed path: M_0 = I and
// dM/dt = -(1/2) M Ric_{U_t}, integrated with Ric frozen per step (exact
// per-step matrix exponential). Constant-curvature kinds reduce to the scalar
// factor exp(-K dt/2) per step.
std::vector<Mat> damping_matrices(const FramedPath& path);

// First grid time with rho_hat = distance(o, x)/2 >= m (infinity if never).
double hitting_time(const FramedPath& path, const Vec& o, double m);

}  // namespace pathspace
