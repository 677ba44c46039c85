#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "pathspace/geometry.hpp"
#include "pathspace/linalg.hpp"

namespace pathspace {

// Log-Sobolev constant C(K) = 4/K^2 for a Ricci lower bound K > 0.
double lsi_constant(double K);

// Whole-line constant 8/K^2 + 2 C1/K, where C1 is an upper log-Sobolev
// constant for the start measure.
double whole_line_lsi_constant(double K, double C1);

// eta(s) = sup_x E_x[exp(-int_0^s K(gamma(r)) dr)] for constant curvature
// bound K: exactly e^{-K s}.
double eta_constant_curvature(double K, double s);

// delta_eps(T) = eps^{-1} (1 - e^{-eps T}) * int_0^T e^{eps s} eta(s) ds with
// eta(s) = e^{-K s}; requires eps in (0,1). Closed form for any K >= 0.
double delta_eps(double K, double eps, double T);

// sup_T delta_eps(T) = 1/(eps (K - eps)) when K > eps; +infinity otherwise.
double delta_eps_sup(double K, double eps);

// Bounded harmonic function on the hyperbolic half-plane: u(x,y) = angle/pi
// with angle = atan2(y,x) in (0,pi). Harmonic for y^2 * (Euclidean Laplacian),
// values in (0,1). Requires y > 0.
double harmonic_h2(const Vec& p);

// Riemannian gradient of u (chart components): y^2/(pi r^2) * (-y, x).
Vec harmonic_h2_grad(const Vec& p);

// ---------------------------------------------------------------------------
// One-sided inequality verdicts from per-path samples.
//
// A FunctionSample holds, for one test function F over a common ensemble,
// the per-path values F_i and the per-path energies half_gradsq_i =
// (1/2) int |DF(s)|^2 ds, so that mean(half_gradsq) estimates the Dirichlet
// form E(F,F). Verdicts are one-sided: lhs <= rhs + 3 * stderr(lhs - rhs),
// with the stderr of the nonlinear entropy statistic from the delta method.
// ---------------------------------------------------------------------------

struct FunctionSample {
  std::string id;
  Eigen::VectorXd value;        // F_i
  Eigen::VectorXd half_gradsq;  // (1/2) int |DF|^2 per path
};

struct IneqEntry {
  std::string id;
  double lhs = 0.0;       // entropy or variance
  double rhs = 0.0;       // constant * Dirichlet form
  double margin = 0.0;    // lhs - rhs
  double margin_se = 0.0; // delta-method stderr of the margin
  double ratio = 0.0;     // lhs / dirichlet (0 when dirichlet ~ 0)
  double dirichlet = 0.0;
  double dirichlet_se = 0.0;
  int clamped = 0;        // entropy-safeguard activations (must stay 0)
  bool pass = false;      // lhs <= rhs + 3 margin_se
};

// Entropy entry: F is normalized empirically to mean(F^2) = 1; lhs is
// Ent(F^2) = E[F^2 log F^2] of the normalized F, rhs = two_C * E(F,F).
// Values are clamped at 1e-12 in magnitude before the log; activations are
// counted in `clamped`.
IneqEntry entropy_entry(const FunctionSample& s, double two_C);

// Variance entry: lhs = Var(F) with the empirical mean, rhs = delta * E(F,F).
IneqEntry variance_entry(const FunctionSample& s, double delta);

// Ordinary-least-squares slope of y against x.
double ols_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace pathspace
