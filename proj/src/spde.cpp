#include "pathspace/spde.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>

#include "pathspace/path.hpp"

namespace pathspace {

StringState make_constant_string(const Manifold& M, StringBoundary b, int n_sites, double h,
                                 const Vec& origin) {
  if (n_sites < 2) throw GeometryError("a string needs at least two sites");
  if (h <= 0.0) throw GeometryError("site spacing must be positive");
  M.require_point(origin);
  StringState s;
  s.manifold = M;
  s.boundary = b;
  s.h = h;
  s.clock = 0.0;
  s.points.assign(n_sites, origin);
  s.frames.assign(n_sites, M.canonical_frame(origin));
  return s;
}

StringState init_geodesic_walk(const Manifold& M, StringBoundary b, int n_sites, double h,
                               const Vec& origin, RngStream& rng) {
  StringState s = make_constant_string(M, b, n_sites, h, origin);
  double sd = std::sqrt(h);
  Vec x_next;
  Mat U_next;
  for (int j = 0; j + 1 < n_sites; ++j) {
    Vec xi = rng.normal_vec(M.dim(), sd);
    bm_step(M, s.points[j], s.frames[j], xi, x_next, U_next);
    s.points[j + 1] = x_next;
    s.frames[j + 1] = U_next;
  }
  return s;
}

Vec intrinsic_drift(const StringState& s, int j) {
  const Manifold& M = s.manifold;
  const int last = s.sites() - 1;
  Vec drift = Vec::Zero(M.rep_dim());
  if (j > 0) drift += M.log(s.points[j], s.points[j - 1]);
  if (j < last) drift += M.log(s.points[j], s.points[j + 1]);
  drift *= 1.0 / (2.0 * s.h * s.h);
  return drift;
}

namespace {

void check_cfl(const StringState& s, double dt) {
  if (dt <= 0.0) throw GeometryError("time step must be positive");
  if (dt > 0.5 * s.h * s.h * (1.0 + 1e-12))
    throw GeometryError("stability guard violated: dt must be at most h^2/2");
}

// Flat-space step: log/exp are vector subtraction/addition and transport is
// the identity, so the update is plain arithmetic on site values.
void step_euclidean(StringState& s, double dt, RngStream& rng) {
  const int n = s.manifold.dim();
  const int last = s.sites() - 1;
  const double inv2h2 = 1.0 / (2.0 * s.h * s.h);
  const double noise_scale = 1.0 / std::sqrt(s.h);
  const double sd = std::sqrt(dt);
  static thread_local std::vector<Vec> next;
  next.assign(s.points.begin(), s.points.end());
  for (int j = s.free_begin(); j <= last; ++j) {
    Vec drift = Vec::Zero(n);
    if (j > 0) drift += s.points[j - 1] - s.points[j];
    if (j < last) drift += s.points[j + 1] - s.points[j];
    drift *= inv2h2;
    Vec noise = rng.normal_vec(n, sd);
    next[j] = s.points[j] + drift * dt + noise_scale * (s.frames[j] * noise);
  }
  s.points.swap(next);
  s.clock += dt;
}

void step_generic_impl(StringState& s, double dt, RngStream& rng) {
  const Manifold& M = s.manifold;
  const int n = M.dim();
  const int last = s.sites() - 1;
  const double noise_scale = 1.0 / std::sqrt(s.h);
  const double sd = std::sqrt(dt);
  static thread_local std::vector<Vec> next_points;
  static thread_local std::vector<Mat> next_frames;
  next_points.assign(s.points.begin(), s.points.end());
  next_frames.assign(s.frames.begin(), s.frames.end());
  for (int j = s.free_begin(); j <= last; ++j) {
    Vec v = intrinsic_drift(s, j) * dt;
    Vec noise = rng.normal_vec(n, sd);
    v += noise_scale * (s.frames[j] * noise);
    Vec x_new = M.exp(s.points[j], v);
    Mat U_new(s.frames[j].rows(), s.frames[j].cols());
    for (int c = 0; c < U_new.cols(); ++c)
      U_new.col(c) = M.transport(s.points[j], x_new, s.frames[j].col(c));
    M.orthonormalize(x_new, U_new);
    next_points[j] = x_new;
    next_frames[j] = U_new;
  }
  s.points.swap(next_points);
  s.frames.swap(next_frames);
  s.clock += dt;
}

}  // namespace

void string_step(StringState& s, double dt, RngStream& rng) {
  check_cfl(s, dt);
  if (s.manifold.kind() == ManifoldKind::Euclidean)
    step_euclidean(s, dt, rng);
  else
    step_generic_impl(s, dt, rng);
}

void evolve_string(StringState& s, double t_total, double dt, RngStream& rng) {
  int steps = grid_steps(t_total, dt);
  for (int k = 0; k < steps; ++k) string_step(s, dt, rng);
}

namespace detail {
void string_step_generic(StringState& s, double dt, RngStream& rng) {
  check_cfl(s, dt);
  step_generic_impl(s, dt, rng);
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Exact flat-space solver.
// ---------------------------------------------------------------------------

DNSpectrum dn_spectrum(int J, double h) {
  if (J < 1) throw GeometryError("need at least one free site");
  if (h <= 0.0) throw GeometryError("site spacing must be positive");
  DNSpectrum sp;
  sp.J = J;
  sp.h = h;
  sp.theta.resize(J);
  sp.lambda.resize(J);
  sp.kappa.resize(J);
  sp.mode_var.resize(J);
  sp.V.resize(J, J);
  const double pi = 4.0 * std::atan(1.0);
  const double norm = std::sqrt(4.0 / (2.0 * J + 1.0));
  for (int k = 1; k <= J; ++k) {
    double th = (2.0 * k - 1.0) * pi / (2.0 * J + 1.0);
    double lam = 2.0 * (1.0 - std::cos(th)) / (h * h);
    sp.theta[k - 1] = th;
    sp.lambda[k - 1] = lam;
    sp.kappa[k - 1] = 0.5 * lam;
    sp.mode_var[k - 1] = 1.0 / (h * lam);
    for (int j = 1; j <= J; ++j) sp.V(j - 1, k - 1) = norm * std::sin(th * j);
  }
  return sp;
}

LatticeGaussian lattice_bm_law(int J, double h) {
  LatticeGaussian g;
  g.J = J;
  g.h = h;
  g.mean = Eigen::VectorXd::Zero(J);
  g.cov = stationary_covariance(J, h);
  return g;
}

LatticeGaussian lattice_point_law(int J, double h, const Eigen::VectorXd& data) {
  if (data.size() != J) throw GeometryError("initial data size mismatch");
  LatticeGaussian g;
  g.J = J;
  g.h = h;
  g.mean = data;
  g.cov = Eigen::MatrixXd::Zero(J, J);
  return g;
}

Eigen::MatrixXd stationary_covariance(int J, double h) {
  Eigen::MatrixXd C(J, J);
  for (int i = 1; i <= J; ++i)
    for (int j = 1; j <= J; ++j) C(i - 1, j - 1) = h * std::min(i, j);
  return C;
}

Eigen::MatrixXd euler_stationary_covariance(int J, double h, double dt) {
  DNSpectrum sp = dn_spectrum(J, h);
  Eigen::VectorXd c(J);
  for (int k = 0; k < J; ++k) {
    double kap = sp.kappa[k];
    if (dt * kap >= 2.0) throw GeometryError("Euler chain unstable at this dt");
    c[k] = (1.0 / h) / (kap * (2.0 - dt * kap));
  }
  return sp.V * c.asDiagonal() * sp.V.transpose();
}

LatticeGaussian exact_evolve(const LatticeGaussian& g, double t) {
  if (t < 0.0) throw GeometryError("evolution time must be nonnegative");
  DNSpectrum sp = dn_spectrum(g.J, g.h);
  Eigen::VectorXd decay(g.J);
  for (int k = 0; k < g.J; ++k) decay[k] = std::exp(-sp.kappa[k] * t);
  Eigen::VectorXd m = sp.V.transpose() * g.mean;
  Eigen::MatrixXd C = sp.V.transpose() * g.cov * sp.V;
  for (int k = 0; k < g.J; ++k) {
    m[k] *= decay[k];
    for (int l = 0; l < g.J; ++l) C(k, l) *= decay[k] * decay[l];
    C(k, k) += sp.mode_var[k] * (1.0 - decay[k] * decay[k]);
  }
  LatticeGaussian out;
  out.J = g.J;
  out.h = g.h;
  out.mean = sp.V * m;
  out.cov = sp.V * C * sp.V.transpose();
  // Symmetrize away round-off so downstream factorizations stay clean.
  out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
  return out;
}

Eigen::MatrixXd sample_lattice_gaussian(const LatticeGaussian& g, int n, RngStream& rng) {
  Eigen::MatrixXd samples(n, g.J);
  double scale = g.cov.diagonal().maxCoeff();
  if (scale <= 0.0) {
    for (int i = 0; i < n; ++i) samples.row(i) = g.mean.transpose();
    return samples;
  }
  Eigen::MatrixXd C = g.cov;
  Eigen::LLT<Eigen::MatrixXd> llt(C);
  if (llt.info() != Eigen::Success) {
    // PSD with degenerate directions: retry with a tiny diagonal lift.
    C.diagonal().array() += 1e-12 * scale;
    llt.compute(C);
    if (llt.info() != Eigen::Success) throw GeometryError("covariance is not positive semidefinite");
  }
  Eigen::MatrixXd L = llt.matrixL();
  Eigen::VectorXd xi(g.J);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < g.J; ++k) xi[k] = rng.normal();
    samples.row(i) = (g.mean + L * xi).transpose();
  }
  return samples;
}

double dirichlet_heat_kernel(double t, double x, double y) {
  if (t <= 0.0) throw GeometryError("heat kernel needs t > 0");
  if (x < 0.0 || y < 0.0) throw GeometryError("heat kernel arguments must be nonnegative");
  const double pi = 4.0 * std::atan(1.0);
  double a = (x - y) * (x - y) / (2.0 * t);
  double b = (x + y) * (x + y) / (2.0 * t);
  return (std::exp(-a) - std::exp(-b)) / std::sqrt(2.0 * pi * t);
}

namespace {
Eigen::VectorXd site_mode_weights(const DNSpectrum& sp, int site) {
  if (site < 1 || site > sp.J) throw GeometryError("site index out of range");
  return sp.V.row(site - 1).transpose();
}
}  // namespace

std::vector<double> ergodicity_decay_linear(const DNSpectrum& sp, int site,
                                            const std::vector<double>& times) {
  Eigen::VectorXd a = site_mode_weights(sp, site);
  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) {
    double v = 0.0;
    for (int k = 0; k < sp.J; ++k)
      v += a[k] * a[k] * sp.mode_var[k] * std::exp(-2.0 * sp.kappa[k] * t);
    out.push_back(v);
  }
  return out;
}

std::vector<double> ergodicity_decay_quadratic(const DNSpectrum& sp, int site,
                                               const std::vector<double>& times) {
  std::vector<double> lin = ergodicity_decay_linear(sp, site, times);
  for (double& v : lin) v = 2.0 * v * v;
  return lin;
}

}  // namespace pathspace
