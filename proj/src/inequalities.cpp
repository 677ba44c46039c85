#include "pathspace/inequalities.hpp"

#include <cmath>
#include <limits>

namespace pathspace {

double lsi_constant(double K) {
  if (K <= 0.0) throw GeometryError("log-Sobolev constant needs K > 0");
  return 4.0 / (K * K);
}

double whole_line_lsi_constant(double K, double C1) {
  if (K <= 0.0) throw GeometryError("whole-line constant needs K > 0");
  if (C1 < 0.0) throw GeometryError("start-measure constant must be nonnegative");
  return 8.0 / (K * K) + 2.0 * C1 / K;
}

double eta_constant_curvature(double K, double s) {
  if (s < 0.0) throw GeometryError("eta needs s >= 0");
  return std::exp(-K * s);
}

double delta_eps(double K, double eps, double T) {
  if (eps <= 0.0 || eps >= 1.0) throw GeometryError("delta_eps needs eps in (0,1)");
  if (T < 0.0) throw GeometryError("delta_eps needs T >= 0");
  if (K < 0.0) throw GeometryError("delta_eps needs K >= 0");
  // int_0^T e^{(eps-K)s} ds
  double a = eps - K;
  double integral = std::abs(a) < 1e-14 ? T : (std::expm1(a * T)) / a;
  return (-std::expm1(-eps * T)) / eps * integral;
}

double delta_eps_sup(double K, double eps) {
  if (eps <= 0.0 || eps >= 1.0) throw GeometryError("delta_eps needs eps in (0,1)");
  if (K <= eps) return std::numeric_limits<double>::infinity();
  return 1.0 / (eps * (K - eps));
}

double harmonic_h2(const Vec& p) {
  if (p.size() != 2 || p[1] <= 0.0) throw GeometryError("point must lie in the open half-plane");
  const double pi = 4.0 * std::atan(1.0);
  return std::atan2(p[1], p[0]) / pi;
}

Vec harmonic_h2_grad(const Vec& p) {
  if (p.size() != 2 || p[1] <= 0.0) throw GeometryError("point must lie in the open half-plane");
  const double pi = 4.0 * std::atan(1.0);
  double r2 = p[0] * p[0] + p[1] * p[1];
  Vec g(2);
  double c = p[1] * p[1] / (pi * r2);
  g[0] = -c * p[1];
  g[1] = c * p[0];
  return g;
}

namespace {

struct Moments {
  double A = 0.0;  // mean of F^2 log F^2
  double B = 0.0;  // mean of F^2
  double G = 0.0;  // mean of half_gradsq
  double M = 0.0;  // mean of F
};

}  // namespace

IneqEntry entropy_entry(const FunctionSample& s, double two_C) {
  const Eigen::Index n = s.value.size();
  IneqEntry e;
  e.id = s.id;
  Moments mo;
  Eigen::VectorXd a(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double f2 = s.value[i] * s.value[i];
    double f2c = f2;
    if (f2c < 1e-12) {
      f2c = 1e-12;
      ++e.clamped;
    }
    a[i] = f2 * std::log(f2c);
    mo.A += a[i];
    mo.B += f2;
    mo.G += s.half_gradsq[i];
  }
  mo.A /= n;
  mo.B /= n;
  mo.G /= n;

  // Normalized-F quantities: Ent = A/B - log B, rhs = two_C * G / B.
  e.lhs = mo.A / mo.B - std::log(mo.B);
  e.dirichlet = mo.G / mo.B;
  e.rhs = two_C * e.dirichlet;
  e.margin = e.lhs - e.rhs;
  e.ratio = e.dirichlet > 0.0 ? e.lhs / e.dirichlet : 0.0;

  // Delta method for Q(A,B,G) = (A - two_C G)/B - log B.
  double dA = 1.0 / mo.B;
  double dB = -(mo.A - two_C * mo.G) / (mo.B * mo.B) - 1.0 / mo.B;
  double dG = -two_C / mo.B;
  double var_q = 0.0, var_g = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double f2 = s.value[i] * s.value[i];
    double u = dA * (a[i] - mo.A) + dB * (f2 - mo.B) + dG * (s.half_gradsq[i] - mo.G);
    var_q += u * u;
    double ug = (s.half_gradsq[i] - mo.G) / mo.B - (mo.G / (mo.B * mo.B)) * (f2 - mo.B);
    var_g += ug * ug;
  }
  var_q /= double(n) * double(n - 1);
  var_g /= double(n) * double(n - 1);
  e.margin_se = std::sqrt(var_q);
  e.dirichlet_se = std::sqrt(var_g);
  e.pass = e.margin <= 3.0 * e.margin_se;
  return e;
}

IneqEntry variance_entry(const FunctionSample& s, double delta) {
  const Eigen::Index n = s.value.size();
  IneqEntry e;
  e.id = s.id;
  Moments mo;
  for (Eigen::Index i = 0; i < n; ++i) {
    mo.M += s.value[i];
    mo.B += s.value[i] * s.value[i];
    mo.G += s.half_gradsq[i];
  }
  mo.M /= n;
  mo.B /= n;
  mo.G /= n;
  double var = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double d = s.value[i] - mo.M;
    var += d * d;
  }
  var /= double(n - 1);

  e.lhs = var;
  e.dirichlet = mo.G;
  e.rhs = delta * mo.G;
  e.margin = e.lhs - e.rhs;
  e.ratio = mo.G > 0.0 ? var / mo.G : 0.0;

  // Influence of Q = Var(F) - delta * G per sample.
  double var_q = 0.0, var_g = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double d = s.value[i] - mo.M;
    double u = (d * d - var) - delta * (s.half_gradsq[i] - mo.G);
    var_q += u * u;
    double ug = s.half_gradsq[i] - mo.G;
    var_g += ug * ug;
  }
  var_q /= double(n) * double(n - 1);
  var_g /= double(n) * double(n - 1);
  e.margin_se = std::sqrt(var_q);
  e.dirichlet_se = std::sqrt(var_g);
  e.pass = e.margin <= 3.0 * e.margin_se;
  return e;
}

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw GeometryError("slope needs matched samples");
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= double(x.size());
  my /= double(x.size());
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw GeometryError("slope needs distinct abscissae");
  return sxy / sxx;
}

}  // namespace pathspace
