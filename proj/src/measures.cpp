#include "pathspace/measures.hpp"

#include <algorithm>
#include <cmath>

namespace pathspace {

double rho_tilde(const Manifold& M, const Vec& a, const Vec& b) {
  return std::min(M.distance(a, b), 1.0);
}

namespace {

void check_same_grid(const FramedPath& a, const FramedPath& b) {
  if (a.steps() != b.steps() || std::abs(a.dt - b.dt) > 1e-15)
    throw GeometryError("paths must share the time grid");
}

// The L^1 distance integrates per unit block, so block boundaries must be
// grid nodes for the blocks to partition the node weights exactly.
void check_block_aligned(const FramedPath& a) {
  double per_unit = 1.0 / a.dt;
  if (std::abs(per_unit - std::round(per_unit)) > 1e-9 * per_unit)
    throw GeometryError("grid must subdivide unit blocks for the L^1 distance");
}

// Node index of the largest grid time <= t (clamped to the path).
int last_node(const FramedPath& p, double t) {
  int k = static_cast<int>(std::floor(t / p.dt + 1e-9));
  return std::min(k, p.steps());
}

}  // namespace

double d_infinity(const FramedPath& a, const FramedPath& b) {
  check_same_grid(a, b);
  const Manifold& M = a.manifold;
  double H = a.horizon();
  double total = 0.0, weight = 1.0, running = 0.0;
  int k = 0;
  for (int n = 1;; ++n) {
    int k_end = last_node(a, std::min(double(n), H));
    for (; k <= k_end; ++k) running = std::max(running, rho_tilde(M, a.points[k], b.points[k]));
    weight *= 0.5;
    total += weight * running;
    if (double(n) >= H - 1e-9) {
      total += weight * running;  // closed-form tail: windows no longer grow
      break;
    }
  }
  return total;
}

double d_infinity(const TwoSidedPath& a, const TwoSidedPath& b) {
  check_same_grid(a.fwd, b.fwd);
  check_same_grid(a.bwd, b.bwd);
  const Manifold& M = a.fwd.manifold;
  double H = std::max(a.fwd.horizon(), a.bwd.horizon());
  double total = 0.0, weight = 1.0, running = 0.0;
  int kf = 0, kb = 0;
  for (int n = 1;; ++n) {
    int kf_end = last_node(a.fwd, std::min(double(n), a.fwd.horizon()));
    int kb_end = last_node(a.bwd, std::min(double(n), a.bwd.horizon()));
    for (; kf <= kf_end; ++kf)
      running = std::max(running, rho_tilde(M, a.fwd.points[kf], b.fwd.points[kf]));
    for (; kb <= kb_end; ++kb)
      running = std::max(running, rho_tilde(M, a.bwd.points[kb], b.bwd.points[kb]));
    weight *= 0.5;
    total += weight * running;
    if (double(n) >= H - 1e-9) {
      total += weight * running;
      break;
    }
  }
  return total;
}

namespace {

// Trapezoid integral of rho_tilde over the block (lo, hi] intersected with
// the grid, including the node at lo as a half-weight endpoint.
double block_integral(const Manifold& M, const FramedPath& a, const FramedPath& b, double lo,
                      double hi) {
  hi = std::min(hi, a.horizon());
  if (hi <= lo + 1e-12) return 0.0;
  int k0 = last_node(a, lo);
  int k1 = last_node(a, hi);
  if (k1 <= k0) return 0.0;
  double sum = 0.0;
  for (int k = k0; k <= k1; ++k) {
    double w = (k == k0 || k == k1) ? 0.5 * a.dt : a.dt;
    sum += w * rho_tilde(M, a.points[k], b.points[k]);
  }
  return sum;
}

}  // namespace

double d_tilde(const FramedPath& a, const FramedPath& b) {
  check_same_grid(a, b);
  check_block_aligned(a);
  const Manifold& M = a.manifold;
  double H = a.horizon();
  double total = 0.0, weight = 1.0;
  int blocks = static_cast<int>(std::ceil(H - 1e-9));
  for (int n = 1; n <= std::max(blocks, 1); ++n) {
    weight *= 0.5;
    total += weight * block_integral(M, a, b, double(n - 1), double(n));
  }
  return total;
}

double d_tilde(const TwoSidedPath& a, const TwoSidedPath& b) {
  check_same_grid(a.fwd, b.fwd);
  check_same_grid(a.bwd, b.bwd);
  check_block_aligned(a.fwd);
  check_block_aligned(a.bwd);
  const Manifold& M = a.fwd.manifold;
  double H = std::max(a.fwd.horizon(), a.bwd.horizon());
  double total = 0.0, weight = 1.0;
  int blocks = static_cast<int>(std::ceil(H - 1e-9));
  for (int n = 1; n <= std::max(blocks, 1); ++n) {
    weight *= 0.5;
    total += weight * block_integral(M, a.fwd, b.fwd, double(n - 1), double(n));
    total += weight * block_integral(M, a.bwd, b.bwd, double(n - 1), double(n));
  }
  return total;
}

double legendre_p(int l, double x) {
  if (l == 0) return 1.0;
  if (l == 1) return x;
  double pm2 = 1.0, pm1 = x;
  for (int k = 2; k <= l; ++k) {
    double p = ((2.0 * k - 1.0) * x * pm1 - (k - 1.0) * pm2) / k;
    pm2 = pm1;
    pm1 = p;
  }
  return pm1;
}

double HeatKernel::operator()(double t, const Vec& x, const Vec& y) const {
  return heat_kernel(manifold, t, x, y, l_max, t_floor);
}

double heat_kernel(const Manifold& M, double t, const Vec& x, const Vec& y, int l_max,
                   double t_floor) {
  if (t <= 0.0) throw GeometryError("heat kernel needs t > 0");
  const double pi = 4.0 * std::atan(1.0);
  switch (M.kind()) {
    case ManifoldKind::Euclidean: {
      double r2 = (x - y).squaredNorm();
      double n = double(M.dim());
      return std::pow(2.0 * pi * t, -0.5 * n) * std::exp(-r2 / (2.0 * t));
    }
    case ManifoldKind::Sphere2: {
      if (t < t_floor)
        throw GeometryError("time below the spectral truncation validity floor");
      M.require_point(x);
      M.require_point(y);
      double c = std::clamp(x.dot(y), -1.0, 1.0);
      double sum = 0.0;
      for (int l = 0; l <= l_max; ++l)
        sum += (2.0 * l + 1.0) / (4.0 * pi) * std::exp(-0.5 * l * (l + 1.0) * t) * legendre_p(l, c);
      return sum;
    }
    default:
      throw GeometryError("no heat kernel evaluator for this manifold");
  }
}

double finite_dim_density(const Manifold& M, const NuSpec& nu, const std::vector<double>& times,
                          const std::vector<Vec>& points, int l_max, double t_floor) {
  if (times.size() != points.size() || times.empty())
    throw GeometryError("times and points must match and be nonempty");
  int zero = -1;
  for (size_t i = 0; i < times.size(); ++i) {
    if (i > 0 && times[i] <= times[i - 1]) throw GeometryError("times must be strictly increasing");
    if (std::abs(times[i]) < 1e-12) zero = static_cast<int>(i);
  }
  if (zero < 0) throw GeometryError("the time grid must contain 0");
  double density = nu_density(nu, M, points[zero]);
  // Backward chain from the time-0 point, then the forward chain.
  for (int i = zero; i > 0; --i) {
    double gap = times[i] - times[i - 1];
    density *= heat_kernel(M, gap, points[i], points[i - 1], l_max, t_floor);
  }
  for (size_t i = zero; i + 1 < times.size(); ++i) {
    double gap = times[i + 1] - times[i];
    density *= heat_kernel(M, gap, points[i], points[i + 1], l_max, t_floor);
  }
  return density;
}

}  // namespace pathspace
