#pragma once

#include <vector>

#include "pathspace/geometry.hpp"
#include "pathspace/linalg.hpp"
#include "pathspace/path.hpp"

namespace pathspace {

// Distance truncated at 1.
double rho_tilde(const Manifold& M, const Vec& a, const Vec& b);

// ---------------------------------------------------------------------------
// Path-space distances on a common grid. Both paths must share dt and step
// count (grid mismatch throws).
//
// d_infinity sums geometric weights on nested window suprema,
//   d_inf = sum_{n>=1} 2^{-n} sup_{|s|<=n, s in domain} rho_tilde(a(s), b(s)),
// evaluated on grid nodes; windows beyond the horizon clamp to the full
// domain, so the remaining tail sums in closed form. One-sided paths use
// windows [0,n], two-sided paths [-n,n]. Always <= 1.
//
// d_tilde is the weighted L^1 version: per unit block ((n-1,n], and its
// mirror image for two-sided paths) the trapezoid integral of rho_tilde gets
// weight 2^{-n}. It is dominated by d_infinity (one-sided) and by
// 2 d_infinity (two-sided).
// ---------------------------------------------------------------------------
double d_infinity(const FramedPath& a, const FramedPath& b);
double d_infinity(const TwoSidedPath& a, const TwoSidedPath& b);
double d_tilde(const FramedPath& a, const FramedPath& b);
double d_tilde(const TwoSidedPath& a, const TwoSidedPath& b);

// ---------------------------------------------------------------------------
// Heat kernels for the generator (1/2) Laplacian, densities with respect to
// the Riemannian volume.
//   Euclidean: (2 pi t)^{-n/2} exp(-|x-y|^2 / (2t)), any t > 0.
//   Sphere2:   sum_{l<=l_max} (2l+1)/(4 pi) e^{-l(l+1)t/2} P_l(cos rho);
//              valid for t >= t_floor (truncation tail below 1e-12), error
//              below the floor.
// ---------------------------------------------------------------------------
struct HeatKernel {
  Manifold manifold = Manifold::euclidean(1);
  int l_max = 60;
  double t_floor = 0.01;

  double operator()(double t, const Vec& x, const Vec& y) const;
};

double heat_kernel(const Manifold& M, double t, const Vec& x, const Vec& y, int l_max = 60,
                   double t_floor = 0.01);

// Legendre polynomial P_l(x) by the three-term recurrence.
double legendre_p(int l, double x);

// ---------------------------------------------------------------------------
// Finite-dimensional density of the path measure with start law nu at the
// grid (times, points): the product of transition densities along the
// backward chain and the forward chain from the time-0 point, times the
// nu-density at that point. `times` must be strictly increasing and contain
// 0; `points` matches it entrywise.
// ---------------------------------------------------------------------------
double finite_dim_density(const Manifold& M, const NuSpec& nu, const std::vector<double>& times,
                          const std::vector<Vec>& points, int l_max = 60, double t_floor = 0.01);

}  // namespace pathspace
