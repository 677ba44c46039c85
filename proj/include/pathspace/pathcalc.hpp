#pragma once

#include <optional>

#include "pathspace/cylinder.hpp"
#include "pathspace/path.hpp"

namespace pathspace {

// Adapted truncation multiplier along one path leg:
//   l(t) = hat_T(t) * clamp(m - max(m-1, sup_{s<=t} rho_hat(s)), 0, 1),
// rho_hat = distance(o, .)/2, hat_T == 1 on [0,T] and falls linearly to 0 at T+1.
// l == 1 until the running radius reaches m-1 (and t <= T), == 0 after it
// reaches m; it only looks at the past, so the Ito sums against it stay
// adapted. lprime is the backward difference (l_k - l_{k-1})/dt with l'_0 = 0.
struct CutoffSeries {
  std::vector<double> l;
  std::vector<double> lprime;
};

struct CutoffParams {
  double m = std::numeric_limits<double>::infinity();
  double T = std::numeric_limits<double>::infinity();
  bool trivial() const { return !std::isfinite(m) && !std::isfinite(T); }
};

CutoffSeries cutoff_series(const FramedPath& path, const Vec& o, const CutoffParams& cp);

// Window integrals I_j (trapezoid on the grid; window ends must sit on the grid).
Vec window_integrals(const CylinderFunction& F, const FramedPath& fwd, const FramedPath* bwd);

double eval_cylinder(const CylinderFunction& F, const FramedPath& path);
double eval_cylinder(const CylinderFunction& F, const TwoSidedPath& path);

// DF along the grid of one leg: DF(t_k) = sum_j df_j * U_k^{-1} grad g_j(t_k, x_k)
// on 0 < t_k <= T_j; entry 0 is zero. Frame coordinates (R^dim per node).
struct GradientSeries {
  std::vector<Vec> fwd;
  std::vector<Vec> bwd;  // empty for one-sided paths; bwd[k] is the value at time -t_k
};

GradientSeries gradient_series(const CylinderFunction& F, const FramedPath& path);
GradientSeries gradient_series(const CylinderFunction& F, const TwoSidedPath& path);

// Quadrature of sum_legs int <A(s), B(s)> ds for two gradient series on the same grid.
double gradient_inner(const GradientSeries& A, const GradientSeries& B, double dt);

// D_h F with the truncation applied: sum_legs int <DF(s), l(s) h(+-s)> ds.
double directional_derivative(const CylinderFunction& F, const GradientSeries& G,
                              const DirectionField& h, const CutoffSeries& lf,
                              const CutoffSeries* lb, double dt);

// Both sides of the integration-by-parts identity evaluated on one path with
// common randomness: lhs = <DF, l h>_H as above; rhs = F * Theta with Theta the
// left-point Ito sum of <l h' + l' h + (1/2) Ric (l h), dbeta> over each leg.
struct IbpTerms {
  double lhs = 0;
  double rhs = 0;
  double F = 0;
  double theta = 0;
};

IbpTerms ibp_terms(const CylinderFunction& F, const FramedPath& path, const DirectionField& h,
                   const CutoffParams& cp, const Vec& o);
IbpTerms ibp_terms(const CylinderFunction& F, const TwoSidedPath& path, const DirectionField& h,
                   const CutoffParams& cp, const Vec& o);

// Same terms for every (function, direction) pair on one path, sharing the
// per-path work: the truncation series and each Theta are computed once per
// direction, each gradient series once per function. Row-major:
// result[i * hs.size() + j] holds the terms for (Fs[i], hs[j]). Must agree
// with ibp_terms pair by pair.
std::vector<IbpTerms> ibp_suite_terms(const std::vector<CylinderFunction>& Fs,
                                      const std::vector<DirectionField>& hs,
                                      const FramedPath& path, const CutoffParams& cp,
                                      const Vec& o);

// Damped gradient integral J = sum_legs int M_s DF(s) ds in frame coordinates
// at time 0 (estimator integrand for the derivative of x -> E_x[F]).
Vec damped_gradient_integral(const CylinderFunction& F, const TwoSidedPath& path);

}  // namespace pathspace
