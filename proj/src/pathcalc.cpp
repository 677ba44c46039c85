#include "pathspace/pathcalc.hpp"

#include <cmath>

namespace pathspace {

namespace {

inline double hat(double t, double T) {
  if (!std::isfinite(T) || t <= T) return 1.0;
  if (t >= T + 1.0) return 0.0;
  return 1.0 - (t - T);
}

inline double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

// Trapezoid weights: dt at interior nodes, dt/2 at the two ends.
inline double trap_w(int k, int K, double dt) { return (k == 0 || k == K) ? 0.5 * dt : dt; }

double window_integral(const WindowSpec& w, const FramedPath& leg, double sign) {
  int K = leg.node_at(w.T);
  if (K > leg.steps()) throw GeometryError("cylinder window exceeds the path horizon");
  double acc = 0;
  for (int k = 0; k <= K; ++k) {
    acc += trap_w(k, K, leg.dt) * w.g(sign * leg.time(k), leg.points[k]);
  }
  return acc;
}

}  // namespace

CutoffSeries cutoff_series(const FramedPath& path, const Vec& o, const CutoffParams& cp) {
  std::size_t n = path.points.size();
  CutoffSeries cs;
  cs.l.assign(n, 1.0);
  cs.lprime.assign(n, 0.0);
  if (cp.trivial()) return cs;
  const Manifold& M = path.manifold;
  double run_sup = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double rho_hat = 0.5 * M.distance(o, path.points[k]);
    if (rho_hat > run_sup) run_sup = rho_hat;
    double clamp_part = std::isfinite(cp.m)
                            ? clamp01(cp.m - std::max(cp.m - 1.0, run_sup))
                            : 1.0;
    cs.l[k] = hat(path.time(k), cp.T) * clamp_part;
    if (k > 0) cs.lprime[k] = (cs.l[k] - cs.l[k - 1]) / path.dt;
  }
  return cs;
}

Vec window_integrals(const CylinderFunction& F, const FramedPath& fwd, const FramedPath* bwd) {
  Vec I(F.arity());
  for (int j = 0; j < F.arity(); ++j) {
    const WindowSpec& w = F.windows[j];
    if (!w.backward) {
      I[j] = window_integral(w, fwd, +1.0);
    } else {
      if (!bwd) throw GeometryError(F.id + ": backward window needs a two-sided path");
      I[j] = window_integral(w, *bwd, -1.0);
    }
  }
  return I;
}

double eval_cylinder(const CylinderFunction& F, const FramedPath& path) {
  return F.f(window_integrals(F, path, nullptr));
}

double eval_cylinder(const CylinderFunction& F, const TwoSidedPath& path) {
  return F.f(window_integrals(F, path.fwd, &path.bwd));
}

namespace {

void grad_leg(const CylinderFunction& F, const FramedPath& leg, bool backward_leg, const Vec& df,
              std::vector<Vec>& out) {
  const Manifold& M = F.manifold;
  int n = M.dim();
  out.assign(leg.points.size(), Vec(Vec::Zero(n)));
  for (int j = 0; j < F.arity(); ++j) {
    const WindowSpec& w = F.windows[j];
    if (w.backward != backward_leg) continue;
    if (df[j] == 0.0) continue;
    int K = leg.node_at(w.T);
    if (K > leg.steps()) throw GeometryError("cylinder window exceeds the path horizon");
    double sign = backward_leg ? -1.0 : 1.0;
    for (int k = 1; k <= K; ++k) {  // indicator excludes s = 0
      Vec grad = w.grad_g(sign * leg.time(k), leg.points[k]);
      out[k] += df[j] * M.frame_coords(leg.points[k], leg.frames[k], grad);
    }
  }
}

}  // namespace

GradientSeries gradient_series(const CylinderFunction& F, const FramedPath& path) {
  if (F.two_sided()) throw GeometryError(F.id + ": two-sided function on a one-sided path");
  GradientSeries gs;
  Vec df = F.grad_f(window_integrals(F, path, nullptr));
  grad_leg(F, path, false, df, gs.fwd);
  return gs;
}

GradientSeries gradient_series(const CylinderFunction& F, const TwoSidedPath& path) {
  GradientSeries gs;
  Vec df = F.grad_f(window_integrals(F, path.fwd, &path.bwd));
  grad_leg(F, path.fwd, false, df, gs.fwd);
  grad_leg(F, path.bwd, true, df, gs.bwd);
  return gs;
}

double gradient_inner(const GradientSeries& A, const GradientSeries& B, double dt) {
  double acc = 0;
  auto leg = [dt](const std::vector<Vec>& a, const std::vector<Vec>& b) {
    if (a.empty() || b.empty()) return 0.0;
    std::size_t K = std::min(a.size(), b.size()) - 1;
    double s = 0;
    for (std::size_t k = 0; k <= K; ++k) {
      s += trap_w(int(k), int(K), dt) * a[k].dot(b[k]);
    }
    return s;
  };
  acc += leg(A.fwd, B.fwd);
  acc += leg(A.bwd, B.bwd);
  return acc;
}

double directional_derivative(const CylinderFunction& F, const GradientSeries& G,
                              const DirectionField& h, const CutoffSeries& lf,
                              const CutoffSeries* lb, double dt) {
  (void)F;
  double acc = 0;
  std::size_t Kf = G.fwd.size();
  for (std::size_t k = 0; k < Kf; ++k) {
    double t = double(k) * dt;
    if (t > h.support) break;
    acc += trap_w(int(k), int(Kf - 1), dt) * lf.l[k] * G.fwd[k].dot(h.h(t));
  }
  if (!G.bwd.empty()) {
    if (!lb) throw GeometryError("two-sided directional derivative needs a backward cutoff");
    std::size_t Kb = G.bwd.size();
    for (std::size_t k = 0; k < Kb; ++k) {
      double t = double(k) * dt;
      if (t > h.support) break;
      acc += trap_w(int(k), int(Kb - 1), dt) * lb->l[k] * G.bwd[k].dot(h.h(-t));
    }
  }
  return acc;
}

namespace {

// Left-point Ito sum over one leg: sum_k <l_k h'(t_k) + l'_k h(t_k)
// + (1/2) Ric (l_k h(t_k)), dbeta_k>, with time flipped on the backward leg
// (h evaluated at -t, and d/ds h(-s) = -h'(-s)).
double ito_leg(const FramedPath& leg, const DirectionField& h, const CutoffSeries& cs,
               bool backward_leg) {
  const Manifold& M = leg.manifold;
  double acc = 0;
  double sign = backward_leg ? -1.0 : 1.0;
  int N = leg.steps();
  for (int k = 0; k < N; ++k) {
    double t = leg.time(k);
    // Every term carries a factor of h or h', so nothing survives past the support.
    if (t > h.support) break;
    Vec hv = h.h(sign * t);
    Vec hp = sign * h.hprime(sign * t);
    Mat ric = M.ricci_in_frame(leg.points[k], leg.frames[k]);
    Vec ck = cs.l[k] * hp + cs.lprime[k] * hv + 0.5 * cs.l[k] * (ric * hv);
    acc += ck.dot(leg.increments[k]);
  }
  return acc;
}

}  // namespace

IbpTerms ibp_terms(const CylinderFunction& F, const FramedPath& path, const DirectionField& h,
                   const CutoffParams& cp, const Vec& o) {
  IbpTerms out;
  GradientSeries G = gradient_series(F, path);
  CutoffSeries cs = cutoff_series(path, o, cp);
  out.F = eval_cylinder(F, path);
  out.lhs = directional_derivative(F, G, h, cs, nullptr, path.dt);
  out.theta = ito_leg(path, h, cs, false);
  out.rhs = out.F * out.theta;
  return out;
}

IbpTerms ibp_terms(const CylinderFunction& F, const TwoSidedPath& path, const DirectionField& h,
                   const CutoffParams& cp, const Vec& o) {
  IbpTerms out;
  GradientSeries G = gradient_series(F, path);
  CutoffSeries cf = cutoff_series(path.fwd, o, cp);
  CutoffSeries cb = cutoff_series(path.bwd, o, cp);
  out.F = eval_cylinder(F, path);
  out.lhs = directional_derivative(F, G, h, cf, &cb, path.fwd.dt);
  out.theta = ito_leg(path.fwd, h, cf, false) + ito_leg(path.bwd, h, cb, true);
  out.rhs = out.F * out.theta;
  return out;
}

std::vector<IbpTerms> ibp_suite_terms(const std::vector<CylinderFunction>& Fs,
                                      const std::vector<DirectionField>& hs,
                                      const FramedPath& path, const CutoffParams& cp,
                                      const Vec& o) {
  CutoffSeries cs = cutoff_series(path, o, cp);
  std::vector<double> theta(hs.size());
  for (std::size_t j = 0; j < hs.size(); ++j) theta[j] = ito_leg(path, hs[j], cs, false);
  std::vector<IbpTerms> out(Fs.size() * hs.size());
  for (std::size_t i = 0; i < Fs.size(); ++i) {
    GradientSeries G = gradient_series(Fs[i], path);
    double Fval = eval_cylinder(Fs[i], path);
    for (std::size_t j = 0; j < hs.size(); ++j) {
      IbpTerms& t = out[i * hs.size() + j];
      t.F = Fval;
      t.theta = theta[j];
      t.lhs = directional_derivative(Fs[i], G, hs[j], cs, nullptr, path.dt);
      t.rhs = Fval * theta[j];
    }
  }
  return out;
}

Vec damped_gradient_integral(const CylinderFunction& F, const TwoSidedPath& path) {
  const Manifold& M = F.manifold;
  int n = M.dim();
  GradientSeries G = gradient_series(F, path);
  Vec J = Vec::Zero(n);
  std::vector<Mat> Mf = damping_matrices(path.fwd);
  std::vector<Mat> Mb = damping_matrices(path.bwd);
  double dt = path.fwd.dt;
  std::size_t Kf = G.fwd.size();
  for (std::size_t k = 0; k < Kf; ++k) J += trap_w(int(k), int(Kf - 1), dt) * (Mf[k] * G.fwd[k]);
  std::size_t Kb = G.bwd.size();
  for (std::size_t k = 0; k < Kb; ++k) J += trap_w(int(k), int(Kb - 1), dt) * (Mb[k] * G.bwd[k]);
  return J;
}

}  // namespace pathspace
