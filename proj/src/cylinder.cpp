#include "pathspace/cylinder.hpp"

#include <cmath>
#include <map>

namespace pathspace {

namespace {

constexpr double kPi = 3.14159265358979323846;

inline double sech2(double x) {
  double t = std::tanh(x);
  return 1.0 - t * t;
}

Vec unit(int n, int i) {
  Vec v = Vec::Zero(n);
  v[i] = 1.0;
  return v;
}

// ---- integrand library ------------------------------------------------------

WindowSpec w_eucl_x1(double T) {
  WindowSpec w;
  w.T = T;
  w.g = [](double, const Vec& x) { return x[0]; };
  w.grad_g = [](double, const Vec& x) { return Vec(unit(x.size(), 0)); };
  return w;
}

WindowSpec w_eucl_tanh_x1(double T) {
  WindowSpec w;
  w.T = T;
  w.g = [](double, const Vec& x) { return std::tanh(x[0]); };
  w.grad_g = [](double, const Vec& x) { return Vec(sech2(x[0]) * unit(x.size(), 0)); };
  return w;
}

WindowSpec w_eucl_gauss(double T) {
  WindowSpec w;
  w.T = T;
  w.g = [](double, const Vec& x) { return std::exp(-0.5 * x.squaredNorm()); };
  w.grad_g = [](double, const Vec& x) { return Vec(-std::exp(-0.5 * x.squaredNorm()) * x); };
  return w;
}

Vec sphere_proj(const Vec& x, const Vec& a) { return a - a.dot(x) * x; }

WindowSpec w_sph_z(double T) {
  WindowSpec w;
  w.T = T;
  w.g = [](double, const Vec& x) { return x[2]; };
  w.grad_g = [](double, const Vec& x) { return sphere_proj(x, unit(3, 2)); };
  return w;
}

WindowSpec w_sph_xy(double T) {
  WindowSpec w;
  w.T = T;
  w.g = [](double, const Vec& x) { return x[0] * x[1]; };
  w.grad_g = [](double, const Vec& x) {
    Vec a(3);
    a << x[1], x[0], 0.0;
    return sphere_proj(x, a);
  };
  return w;
}

WindowSpec w_sph_p0(double T) {
  Vec p0(3);
  p0 << 1.0, 1.0, 1.0;
  p0 /= p0.norm();
  WindowSpec w;
  w.T = T;
  w.g = [p0](double, const Vec& x) { return p0.dot(x); };
  w.grad_g = [p0](double, const Vec& x) { return sphere_proj(x, p0); };
  return w;
}

WindowSpec w_sph_zz(double T) {
  WindowSpec w;
  w.T = T;
  w.g = [](double, const Vec& x) { return x[2] * x[2]; };
  w.grad_g = [](double, const Vec& x) { return sphere_proj(x, Vec(2.0 * x[2] * unit(3, 2))); };
  return w;
}

// Hyperbolic half-plane integrands; Riemannian gradient = y^2 * (d_x g, d_y g).
WindowSpec w_hyp_slope(double T) {
  WindowSpec w;
  w.T = T;
  w.g = [](double, const Vec& p) { return std::tanh(p[0] / p[1]); };
  w.grad_g = [](double, const Vec& p) {
    double s2 = sech2(p[0] / p[1]);
    Vec g(2);
    g << s2 * p[1], -s2 * p[0];
    return g;
  };
  return w;
}

WindowSpec w_hyp_angle(double T) {
  WindowSpec w;
  w.T = T;
  w.g = [](double, const Vec& p) { return std::atan2(p[1], p[0]) / kPi; };
  w.grad_g = [](double, const Vec& p) {
    double r2 = p[0] * p[0] + p[1] * p[1];
    Vec g(2);
    g << -p[1], p[0];
    return Vec(g * (p[1] * p[1] / (kPi * r2)));
  };
  return w;
}

WindowSpec w_hyp_logy(double T) {
  WindowSpec w;
  w.T = T;
  w.g = [](double, const Vec& p) { return std::tanh(std::log(p[1])); };
  w.grad_g = [](double, const Vec& p) {
    Vec g(2);
    g << 0.0, p[1] * sech2(std::log(p[1]));
    return g;
  };
  return w;
}

// ---- outer functions --------------------------------------------------------

void f_exp(CylinderFunction& F, std::vector<double> a) {
  F.f = [a](const Vec& u) {
    double s = 0;
    for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * u[j];
    return std::exp(s);
  };
  F.grad_f = [a](const Vec& u) {
    double s = 0;
    for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * u[j];
    double e = std::exp(s);
    Vec g(u.size());
    for (std::size_t j = 0; j < a.size(); ++j) g[j] = a[j] * e;
    return g;
  };
}

void f_id(CylinderFunction& F) {
  F.f = [](const Vec& u) { return u[0]; };
  F.grad_f = [](const Vec& u) { return Vec(unit(u.size(), 0)); };
}

void f_tanh_shift(CylinderFunction& F, double a) {
  F.f = [a](const Vec& u) { return 2.0 + std::tanh(a * u[0]); };
  F.grad_f = [a](const Vec& u) { return Vec(a * sech2(a * u[0]) * unit(u.size(), 0)); };
}

void f_one_plus_sq(CylinderFunction& F) {
  F.f = [](const Vec& u) { return 1.0 + u[0] * u[0]; };
  F.grad_f = [](const Vec& u) { return Vec(2.0 * u[0] * unit(u.size(), 0)); };
}

WindowSpec backward(WindowSpec w) {
  w.backward = true;
  return w;
}

using Builder = std::function<CylinderFunction(const Manifold&)>;

const std::map<std::string, Builder>& euclid_table() {
  static const std::map<std::string, Builder> t = {
      {"lin-x1-t1",
       [](const Manifold&) {
         CylinderFunction F;
         f_id(F);
         F.windows = {w_eucl_x1(1.0)};
         return F;
       }},
      {"tanh-x1-t1",
       [](const Manifold&) {
         CylinderFunction F;
         f_tanh_shift(F, 1.0);
         F.windows = {w_eucl_tanh_x1(1.0)};
         return F;
       }},
      {"exp-x1-t1",
       [](const Manifold&) {
         CylinderFunction F;
         f_exp(F, {0.5});
         F.windows = {w_eucl_tanh_x1(1.0)};
         return F;
       }},
      {"exp-gauss-t05",
       [](const Manifold&) {
         CylinderFunction F;
         f_exp(F, {0.8});
         F.windows = {w_eucl_gauss(0.5)};
         return F;
       }},
      {"exp2-x1-gauss",
       [](const Manifold&) {
         CylinderFunction F;
         f_exp(F, {0.3, 0.2});
         F.windows = {w_eucl_tanh_x1(1.0), w_eucl_gauss(0.5)};
         return F;
       }},
      {"ts-exp-x1",
       [](const Manifold&) {
         CylinderFunction F;
         f_exp(F, {0.3, 0.3});
         F.windows = {w_eucl_tanh_x1(1.0), backward(w_eucl_tanh_x1(1.0))};
         return F;
       }},
  };
  return t;
}

const std::map<std::string, Builder>& sphere_table() {
  static const std::map<std::string, Builder> t = {
      {"exp-z-t05",
       [](const Manifold&) {
         CylinderFunction F;
         f_exp(F, {0.8});
         F.windows = {w_sph_z(0.5)};
         return F;
       }},
      {"exp-z-t1",
       [](const Manifold&) {
         CylinderFunction F;
         f_exp(F, {0.5});
         F.windows = {w_sph_z(1.0)};
         return F;
       }},
      {"exp-xy-t1",
       [](const Manifold&) {
         CylinderFunction F;
         f_exp(F, {0.7});
         F.windows = {w_sph_xy(1.0)};
         return F;
       }},
      {"exp-p0-t05",
       [](const Manifold&) {
         CylinderFunction F;
         f_exp(F, {0.6});
         F.windows = {w_sph_p0(0.5)};
         return F;
       }},
      {"tanh-z-t1",
       [](const Manifold&) {
         CylinderFunction F;
         f_tanh_shift(F, 1.0);
         F.windows = {w_sph_z(1.0)};
         return F;
       }},
      {"tanh-xy-t05",
       [](const Manifold&) {
         CylinderFunction F;
         f_tanh_shift(F, 1.5);
         F.windows = {w_sph_xy(0.5)};
         return F;
       }},
      {"exp-zz-t1",
       [](const Manifold&) {
         CylinderFunction F;
         f_exp(F, {0.5});
         F.windows = {w_sph_zz(1.0)};
         return F;
       }},
      {"exp2-z-xy",
       [](const Manifold&) {
         CylinderFunction F;
         f_exp(F, {0.4, 0.3});
         F.windows = {w_sph_z(1.0), w_sph_xy(0.5)};
         return F;
       }},
      {"exp2-p0-z",
       [](const Manifold&) {
         CylinderFunction F;
         f_exp(F, {0.3, -0.3});
         F.windows = {w_sph_p0(0.75), w_sph_z(0.25)};
         return F;
       }},
      {"tanh-p0-t1",
       [](const Manifold&) {
         CylinderFunction F;
         f_tanh_shift(F, 1.0);
         F.windows = {w_sph_p0(1.0)};
         return F;
       }},
      {"quad-z-t1",
       [](const Manifold&) {
         CylinderFunction F;
         f_one_plus_sq(F);
         F.windows = {w_sph_z(1.0)};
         return F;
       }},
      {"exp2-z-zz",
       [](const Manifold&) {
         CylinderFunction F;
         f_exp(F, {0.2, 0.4});
         F.windows = {w_sph_z(0.5), w_sph_zz(1.0)};
         return F;
       }},
      {"ts-exp-z",
       [](const Manifold&) {
         CylinderFunction F;
         f_exp(F, {0.4, 0.3});
         F.windows = {w_sph_z(1.0), backward(w_sph_z(1.0))};
         return F;
       }},
      // Mirror twin of exp-z-t1: depends only on the backward leg, so its law
      // under a nu-randomized start must match exp-z-t1 on one-sided paths.
      {"ts-bwd-z",
       [](const Manifold&) {
         CylinderFunction F;
         f_exp(F, {0.5});
         F.windows = {backward(w_sph_z(1.0))};
         return F;
       }},
      {"ts-sym-z",
       [](const Manifold&) {
         CylinderFunction F;
         f_exp(F, {0.35, 0.35});
         F.windows = {w_sph_z(1.0), backward(w_sph_z(1.0))};
         return F;
       }},
      {"ts-exp-xy-z",
       [](const Manifold&) {
         CylinderFunction F;
         f_exp(F, {0.3, -0.2});
         F.windows = {w_sph_xy(0.5), backward(w_sph_z(1.0))};
         return F;
       }},
  };
  return t;
}

const std::map<std::string, Builder>& hyper_table() {
  static const std::map<std::string, Builder> t = {
      {"exp-slope-t1",
       [](const Manifold&) {
         CylinderFunction F;
         f_exp(F, {0.5});
         F.windows = {w_hyp_slope(1.0)};
         return F;
       }},
      {"tanh-angle-t1",
       [](const Manifold&) {
         CylinderFunction F;
         f_tanh_shift(F, 1.0);
         F.windows = {w_hyp_angle(1.0)};
         return F;
       }},
      {"exp2-slope-logy",
       [](const Manifold&) {
         CylinderFunction F;
         f_exp(F, {0.3, 0.3});
         F.windows = {w_hyp_slope(1.0), w_hyp_logy(0.5)};
         return F;
       }},
      {"exp-logy-t05",
       [](const Manifold&) {
         CylinderFunction F;
         f_exp(F, {0.5});
         F.windows = {w_hyp_logy(0.5)};
         return F;
       }},
      {"ts-exp-slope",
       [](const Manifold&) {
         CylinderFunction F;
         f_exp(F, {0.3, 0.3});
         F.windows = {w_hyp_slope(1.0), backward(w_hyp_slope(1.0))};
         return F;
       }},
  };
  return t;
}

const std::map<std::string, Builder>& table_for(const Manifold& M) {
  switch (M.kind()) {
    case ManifoldKind::Euclidean: return euclid_table();
    case ManifoldKind::Sphere2: return sphere_table();
    case ManifoldKind::Hyperbolic2: return hyper_table();
  }
  return euclid_table();
}

Vec probe_point(const Manifold& M, RngStream& rng) {
  Vec o;
  switch (M.kind()) {
    case ManifoldKind::Euclidean: o = Vec::Zero(M.dim()); break;
    case ManifoldKind::Sphere2:
      o = Vec::Zero(3);
      o[2] = 1.0;
      break;
    case ManifoldKind::Hyperbolic2:
      o = Vec::Zero(2);
      o[1] = 1.0;
      break;
  }
  Mat U = M.canonical_frame(o);
  return M.exp(o, Vec(U * rng.normal_vec(M.dim(), 0.6)));
}

}  // namespace

void validate_cylinder(const CylinderFunction& F, RngStream& rng, double tol) {
  const Manifold& M = F.manifold;
  const double eps = 1e-4;
  // Outer gradient.
  for (int probe = 0; probe < 6; ++probe) {
    Vec u(F.arity());
    for (int j = 0; j < F.arity(); ++j) u[j] = 0.5 * F.windows[j].T * rng.normal();
    Vec g = F.grad_f(u);
    for (int j = 0; j < F.arity(); ++j) {
      Vec up = u, um = u;
      up[j] += eps;
      um[j] -= eps;
      double fd = (F.f(up) - F.f(um)) / (2 * eps);
      if (std::abs(fd - g[j]) > tol * (1.0 + std::abs(fd)))
        throw GeometryError(F.id + ": grad_f mismatch in slot " + std::to_string(j));
    }
  }
  // Window gradients against exp-map directional differences.
  for (int j = 0; j < F.arity(); ++j) {
    const WindowSpec& w = F.windows[j];
    for (int probe = 0; probe < 8; ++probe) {
      Vec x = probe_point(M, rng);
      double s = w.T * rng.uniform() * (w.backward ? -1.0 : 1.0);
      Mat U = M.canonical_frame(x);
      Vec eta = U * rng.normal_vec(M.dim());
      double en = M.norm(x, eta);
      if (en < 1e-12) continue;
      eta /= en;
      double fd = (w.g(s, M.exp(x, Vec(eps * eta))) - w.g(s, M.exp(x, Vec(-eps * eta)))) / (2 * eps);
      double an = M.metric(x, w.grad_g(s, x), eta);
      if (std::abs(fd - an) > tol * (1.0 + std::abs(fd)))
        throw GeometryError(F.id + ": grad_g mismatch in window " + std::to_string(j));
    }
  }
}

std::vector<std::string> cylinder_ids(const Manifold& M) {
  std::vector<std::string> ids;
  for (const auto& [k, v] : table_for(M)) ids.push_back(k);
  return ids;
}

std::vector<std::string> cylinder_suite_positive(const Manifold& M) {
  std::vector<std::string> ids;
  for (const auto& [k, v] : table_for(M)) {
    if (k == "lin-x1-t1" || k.rfind("ts-", 0) == 0) continue;  // unbounded / two-sided
    ids.push_back(k);
  }
  return ids;
}

CylinderFunction make_cylinder(const Manifold& M, const std::string& id) {
  const auto& t = table_for(M);
  auto it = t.find(id);
  if (it == t.end()) throw GeometryError("no cylinder function '" + id + "' on " + M.name());
  CylinderFunction F = it->second(M);
  F.id = id;
  F.manifold = M;
  RngStream rng(RngStream::fnv1a("validate:" + id));
  validate_cylinder(F, rng);
  return F;
}

std::vector<std::string> direction_ids() { return {"ramp-e1", "bump-e2", "ts-ramp-e1", "ts-bump-e2"}; }

DirectionField make_direction(int dim, const std::string& id) {
  DirectionField d;
  d.id = id;
  d.dim = dim;
  d.support = 2.0;
  int c2 = dim >= 2 ? 1 : 0;
  auto ramp = [](double s) {  // rises on [0,1], plateau to 1.5, back to 0 at 2
    if (s <= 0.0 || s >= 2.0) return 0.0;
    if (s <= 1.0) return s;
    if (s <= 1.5) return 1.0;
    return 1.0 - 2.0 * (s - 1.5);
  };
  auto rampp = [](double s) {  // right-slope convention at kinks
    if (s < 0.0 || s >= 2.0) return 0.0;
    if (s < 1.0) return 1.0;
    if (s < 1.5) return 0.0;
    return -2.0;
  };
  auto bump = [](double s) { return (s <= 0.0 || s >= 2.0) ? 0.0 : std::pow(std::sin(kPi * s / 2), 2); };
  auto bumpp = [](double s) { return (s <= 0.0 || s >= 2.0) ? 0.0 : (kPi / 2) * std::sin(kPi * s); };

  if (id == "ramp-e1") {
    d.h = [dim, ramp](double s) { return Vec(ramp(s) * unit(dim, 0)); };
    d.hprime = [dim, rampp](double s) { return Vec(rampp(s) * unit(dim, 0)); };
  } else if (id == "bump-e2") {
    d.h = [dim, c2, bump](double s) { return Vec(bump(s) * unit(dim, c2)); };
    d.hprime = [dim, c2, bumpp](double s) { return Vec(bumpp(s) * unit(dim, c2)); };
  } else if (id == "ts-ramp-e1") {
    // Odd extension: h(s) = sign(s) * ramp(|s|); h(0) = 0.
    d.h = [dim, ramp](double s) {
      double v = s >= 0 ? ramp(s) : -ramp(-s);
      return Vec(v * unit(dim, 0));
    };
    d.hprime = [dim, rampp](double s) {
      double v = s >= 0 ? rampp(s) : rampp(-s);
      return Vec(v * unit(dim, 0));
    };
  } else if (id == "ts-bump-e2") {
    d.h = [dim, c2, bump](double s) {
      double v = s >= 0 ? bump(s) : -bump(-s);
      return Vec(v * unit(dim, c2));
    };
    d.hprime = [dim, c2, bumpp](double s) {
      double v = s >= 0 ? bumpp(s) : bumpp(-s);
      return Vec(v * unit(dim, c2));
    };
  } else {
    throw GeometryError("no direction field '" + id + "'");
  }
  return d;
}

}  // namespace pathspace
