#pragma once

#include <Eigen/Dense>
#include <vector>

#include "pathspace/geometry.hpp"
#include "pathspace/linalg.hpp"
#include "pathspace/rng.hpp"

namespace pathspace {

// ---------------------------------------------------------------------------
// Intrinsic lattice heat-equation stepper.
//
// A string is a row of manifold points u_0..u_J at spacing h, each carrying an
// orthonormal frame. One Euler step with time increment dt moves every free
// site along
//
//   u_j <- exp(u_j, drift_j * dt + (1/sqrt(h)) * U_j * dW_j),
//   drift_j = (1/(2 h^2)) * (log(u_j, u_{j+1}) + log(u_j, u_{j-1})),
//
// with dW_j ~ N(0, dt I) independent per site and the missing-neighbor term
// dropped at a free end (Neumann ghost). Frames ride along the update
// geodesic by parallel transport. With PinnedLeft boundary u_0 stays fixed.
// ---------------------------------------------------------------------------

enum class StringBoundary { PinnedLeft, Free };

struct StringState {
  Manifold manifold = Manifold::euclidean(1);
  StringBoundary boundary = StringBoundary::PinnedLeft;
  double h = 0.0;
  double clock = 0.0;
  std::vector<Vec> points;  // site values u_0..u_J
  std::vector<Mat> frames;  // orthonormal frame per site

  int sites() const { return static_cast<int>(points.size()); }
  int free_begin() const { return boundary == StringBoundary::PinnedLeft ? 1 : 0; }
};

// All sites at `origin` with canonical frames.
StringState make_constant_string(const Manifold& M, StringBoundary b, int n_sites, double h,
                                 const Vec& origin);

// Geodesic random walk in the space variable: site j+1 = exp(site j, U_j xi_j)
// with xi_j ~ N(0, h I). This is the lattice analogue of Wiener measure (for
// Euclidean instances the sites are partial sums of N(0, h) increments).
StringState init_geodesic_walk(const Manifold& M, StringBoundary b, int n_sites, double h,
                               const Vec& origin, RngStream& rng);

// Drift vector of the intrinsic discretization at site j (tangent at u_j).
Vec intrinsic_drift(const StringState& s, int j);

// One Euler step; enforces the stability guard dt <= h^2/2 and advances the
// clock. Sites draw their noise in index order from `rng`.
void string_step(StringState& s, double dt, RngStream& rng);

// Repeated stepping for a duration that must sit on the dt-grid.
void evolve_string(StringState& s, double t_total, double dt, RngStream& rng);

namespace detail {
// Reference implementation of the step without the flat-space fast path;
// consumes the same random stream and must produce identical states.
void string_step_generic(StringState& s, double dt, RngStream& rng);
}  // namespace detail

// ---------------------------------------------------------------------------
// Exact solver for the scalar flat-space string on [0, L], pinned at the left
// end and free at the right, J interior sites x_j = j h, h = L/J.
//
// The site vector follows the linear SDE dX = -(1/2) A X dt + (1/sqrt h) dW
// with A the (pinned-left, free-right) second-difference matrix divided by
// h^2. A has closed-form eigenpairs
//
//   theta_k = (2k-1) pi / (2J+1),  lambda_k = 2 (1 - cos theta_k)/h^2,
//   v_k(j) = sin(theta_k j),       |v_k|^2 = (2J+1)/4,   k = 1..J,
//
// so every Gaussian law evolves exactly, one Ornstein-Uhlenbeck factor per
// mode with rate kappa_k = lambda_k / 2 and stationary mode variance
// 1/(h lambda_k). The stationary site covariance is exactly min(x_i, x_j),
// the covariance of Brownian motion sampled at the sites.
// ---------------------------------------------------------------------------

struct DNSpectrum {
  int J = 0;
  double h = 0.0;
  Eigen::VectorXd theta;     // k = 1..J stored 0-based
  Eigen::VectorXd lambda;    // eigenvalues of A
  Eigen::VectorXd kappa;     // decay rates lambda/2
  Eigen::VectorXd mode_var;  // stationary variance per normalized mode, 1/(h lambda)
  Eigen::MatrixXd V;         // orthonormal eigenvectors, column k
};

DNSpectrum dn_spectrum(int J, double h);

struct LatticeGaussian {
  int J = 0;
  double h = 0.0;
  Eigen::VectorXd mean;  // site means, j = 1..J stored 0-based
  Eigen::MatrixXd cov;   // site covariance
};

// Law of the spatial random walk (discrete Brownian motion): mean zero,
// covariance min(x_i, x_j). This is also the stationary law of the exact flow.
LatticeGaussian lattice_bm_law(int J, double h);

// Deterministic initial data as a degenerate Gaussian.
LatticeGaussian lattice_point_law(int J, double h, const Eigen::VectorXd& data);

// Stationary covariance of the continuous-time lattice flow: min(x_i, x_j).
Eigen::MatrixXd stationary_covariance(int J, double h);

// Exact stationary covariance of the Euler chain with step dt (discrete-time
// Lyapunov solution): per-mode variance (1/h) / (kappa_k (2 - dt kappa_k)).
Eigen::MatrixXd euler_stationary_covariance(int J, double h, double dt);

// Exact-in-time evolution of a Gaussian law by the lattice flow.
LatticeGaussian exact_evolve(const LatticeGaussian& g, double t);

// n independent draws (rows) from the law; degenerate directions collapse to
// the mean.
Eigen::MatrixXd sample_lattice_gaussian(const LatticeGaussian& g, int n, RngStream& rng);

// Heat kernel on the half-line with absorbing boundary at 0 (image charges):
// p(t,x,y) = (2 pi t)^{-1/2} [e^{-(x-y)^2/(2t)} - e^{-(x+y)^2/(2t)}].
double dirichlet_heat_kernel(double t, double x, double y);

// Closed-form decay of the stationary variance of the conditional expectation
// P_t F for F(X) = X_site (linear) and F(X) = X_site^2 (quadratic):
//   linear:    v(t) = sum_k a_k^2 s_k e^{-2 kappa_k t},  a = V^T e_site,
//   quadratic: v(t) = 2 (sum_k a_k^2 s_k e^{-2 kappa_k t})^2.
std::vector<double> ergodicity_decay_linear(const DNSpectrum& sp, int site,
                                            const std::vector<double>& times);
std::vector<double> ergodicity_decay_quadratic(const DNSpectrum& sp, int site,
                                               const std::vector<double>& times);

}  // namespace pathspace
