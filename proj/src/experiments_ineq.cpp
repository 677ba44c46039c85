#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "experiments_impl.hpp"
#include "pathspace/inequalities.hpp"
#include "pathspace/pathcalc.hpp"
#include "pathspace/path.hpp"

namespace pathspace {
namespace detail {

namespace {

std::string fmt_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

Vec sphere_pole() {
  Vec p(3);
  p << 0, 0, 1;
  return p;
}

// Per-path F values and energies (1/2) int |DF|^2 for a list of functions on
// a common one-sided ensemble.
struct SuiteRecords {
  std::vector<CylinderFunction> Fs;
  MatrixXd val;   // n x |F|
  MatrixXd grad;  // n x |F|
};

SuiteRecords sample_suite(Ctx& c, const Manifold& M, const Vec& x0, double T,
                          const std::vector<std::string>& ids, const std::string& tag) {
  SuiteRecords out;
  for (const std::string& id : ids) out.Fs.push_back(make_cylinder(M, id));
  const double dt = c.d("dt");
  const std::size_t n = std::size_t(c.i("n_paths"));
  const int m = int(out.Fs.size());
  MatrixXd rec = Ensemble::run(
      n, 2 * m, c.seed, tag,
      [&](std::size_t, RngStream& rng, Eigen::Ref<Eigen::RowVectorXd> row) {
        static thread_local FramedPath path;
        sample_bm_into(path, M, x0, M.canonical_frame(x0), T, dt, rng);
        for (int i = 0; i < m; ++i) {
          GradientSeries G = gradient_series(out.Fs[std::size_t(i)], path);
          row[2 * i] = eval_cylinder(out.Fs[std::size_t(i)], path);
          row[2 * i + 1] = 0.5 * gradient_inner(G, G, dt);
        }
      },
      c.threads);
  out.val = rec(Eigen::all, Eigen::seq(0, 2 * m - 1, 2));
  out.grad = rec(Eigen::all, Eigen::seq(1, 2 * m - 1, 2));
  return out;
}

void entry_details(CsvWriter& csv, const IneqEntry& e, const std::string& kind) {
  csv.add_row({e.id, kind, CsvWriter::num(e.lhs), CsvWriter::num(e.rhs), CsvWriter::num(e.margin),
               CsvWriter::num(e.margin_se), CsvWriter::num(e.dirichlet),
               CsvWriter::num(e.dirichlet_se), std::to_string(e.clamped)});
}

CheckRow& entry_check(Ctx& c, const std::string& name, const IneqEntry& e, bool mandatory = true) {
  CheckRow& r = c.check_bool(name, e.pass, e.lhs, e.rhs, mandatory);
  r.se = e.margin_se;
  r.z = e.margin_se > 0 ? e.margin / e.margin_se : 0.0;
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// lsi: entropy inequalities on sphere path space. One-sided suite against
// 2C = 8 (C = 4/K^2, K = 1); a linearization oracle at F = 1 + eps G; and the
// whole-line suite with a randomized start against the line constant
// 8/K^2 + 2 C1/K.
// ---------------------------------------------------------------------------

void run_lsi(Ctx& c) {
  const Manifold M = Manifold::sphere2();
  const double K = M.ricci_lower_bound();
  const double two_C = 2.0 * lsi_constant(K);
  CsvWriter details({"function", "kind", "lhs", "rhs", "margin", "margin_se", "dirichlet",
                     "dirichlet_se", "clamped"});

  std::vector<std::string> ids = cylinder_suite_positive(M);
  SuiteRecords S = sample_suite(c, M, sphere_pole(), 1.0, ids, "lsi/one-sided");

  int clamp_total = 0;
  int idx_expz = -1;
  for (std::size_t i = 0; i < S.Fs.size(); ++i) {
    if (S.Fs[i].id == "exp-z-t1") idx_expz = int(i);
    FunctionSample s{S.Fs[i].id, S.val.col(int(i)), S.grad.col(int(i))};
    IneqEntry e = entropy_entry(s, two_C);
    clamp_total += e.clamped;
    entry_check(c, "lsi-" + e.id, e);
    entry_details(details, e, "one-sided");
  }
  c.check_tol("lsi-clamp-count", double(clamp_total), 0.0, 0.0);

  // Linearization oracle: for F = 1 + eps (I - mean I) with I the log of the
  // exponential-of-window function, Ent(F^2) = 2 eps^2 Var(I) + O(eps^3), and
  // the inequality reduces to the variance form. I and its energy follow
  // pathwise from the exp-z-t1 records: I = 2 log F, |DI|^2 = 4 |DF|^2 / F^2.
  {
    VectorXd F = S.val.col(idx_expz);
    VectorXd I = 2.0 * F.array().log();
    VectorXd hgI = 4.0 * (S.grad.col(idx_expz).array() / F.array().square());
    const double eps = 0.1;
    VectorXd G = I.array() - I.mean();
    FunctionSample lin{"linearized", VectorXd(1.0 + eps * G.array()), VectorXd(eps * eps * hgI)};
    IneqEntry e = entropy_entry(lin, two_C);
    entry_details(details, e, "linearized");
    double varI = mc_var(I).value;
    double ratio = e.lhs / (2.0 * eps * eps * varI);
    c.check_tol("lsi-linearization-taylor", ratio, 1.0, 0.1);
    FunctionSample rawI{"window-log", I, hgI};
    IneqEntry ev = variance_entry(rawI, two_C);
    entry_check(c, "lsi-linearized-variance", ev);
    entry_details(details, ev, "variance");
  }

  // Whole-line suite: uniform start measure, two independent legs developed
  // from the same initial frame. Line constant 8/K^2 + 2 C1/K where C1 is the
  // entropy constant assumed for the start measure.
  {
    const double C_line = whole_line_lsi_constant(K, c.d("nu_lsi_constant"));
    const std::vector<std::string> ts_ids = {"ts-exp-z", "ts-bwd-z", "ts-sym-z", "ts-exp-xy-z"};
    std::vector<CylinderFunction> Fs;
    for (const std::string& id : ts_ids) Fs.push_back(make_cylinder(M, id));
    CylinderFunction mirror = make_cylinder(M, "exp-z-t1");
    const double dt = c.d("dt");
    const std::size_t n = std::size_t(c.i("n_paths"));
    const int m = int(Fs.size());
    const NuSpec nu = NuSpec::uniform_sphere();
    MatrixXd rec = Ensemble::run(
        n, 2 * m + 1, c.seed, "lsi/whole-line",
        [&](std::size_t, RngStream& rng, Eigen::Ref<Eigen::RowVectorXd> row) {
          Vec x0 = sample_nu(nu, M, rng);
          TwoSidedPath path = sample_two_sided(M, x0, M.canonical_frame(x0), 1.0, 1.0, dt, rng);
          for (int i = 0; i < m; ++i) {
            GradientSeries G = gradient_series(Fs[std::size_t(i)], path);
            row[2 * i] = eval_cylinder(Fs[std::size_t(i)], path);
            row[2 * i + 1] = 0.5 * gradient_inner(G, G, dt);
          }
          row[2 * m] = eval_cylinder(mirror, path.fwd);
        },
        c.threads);
    for (int i = 0; i < m; ++i) {
      FunctionSample s{Fs[std::size_t(i)].id, rec.col(2 * i), rec.col(2 * i + 1)};
      IneqEntry e = entropy_entry(s, 2.0 * C_line);
      entry_check(c, "lsi-line-" + e.id, e);
      entry_details(details, e, "whole-line");
    }
    // The backward-only function must match its forward mirror in law; the
    // two values are paired on the same two-sided path.
    int bwd_idx = 1;  // ts-bwd-z
    VectorXd diff = rec.col(2 * bwd_idx) - rec.col(2 * m);
    MonteCarloEstimate d = mc_mean(diff);
    c.check_z("lsi-line-mirror", d.value, 0.0, d.se);
  }

  details.write(c.path_of("details.csv"));
  c.artifact("details.csv");
}

// ---------------------------------------------------------------------------
// poincare: variance inequalities with the finite-horizon constant
// delta_eps(T); Var(F) <= delta_eps(T) * E[int |DF|^2] = 2 delta_eps(T) * E(F,F).
// ---------------------------------------------------------------------------

void run_poincare(Ctx& c) {
  const Manifold M = Manifold::sphere2();
  const double K = M.ricci_lower_bound();
  const double eps = c.d("eps");
  CsvWriter details({"function", "kind", "lhs", "rhs", "margin", "margin_se", "dirichlet",
                     "dirichlet_se", "clamped"});

  std::vector<std::string> ids = cylinder_suite_positive(M);
  SuiteRecords S = sample_suite(c, M, sphere_pole(), 1.0, ids, "poincare/suite");
  for (std::size_t i = 0; i < S.Fs.size(); ++i) {
    double T = S.Fs[i].max_forward_T();
    double delta = delta_eps(K, eps, T);
    FunctionSample s{S.Fs[i].id, S.val.col(int(i)), S.grad.col(int(i))};
    // variance_entry takes the factor in front of E(F,F) = (1/2) E int |DF|^2.
    IneqEntry e = variance_entry(s, 2.0 * delta);
    CheckRow& r = entry_check(c, "poincare-" + e.id, e);
    (void)r;
    entry_details(details, e, "T=" + fmt_num(T));
  }
  double dsup = delta_eps_sup(K, eps);
  c.check_bool("poincare-delta-sup", std::isfinite(dsup) && dsup >= delta_eps(K, eps, 1.0), dsup,
               delta_eps(K, eps, 1.0), /*mandatory=*/false);

  details.write(c.path_of("details.csv"));
  c.artifact("details.csv");
}

// ---------------------------------------------------------------------------
// poincare-failure: on flat path space the variance of the running integral
// F_T = int_0^T gamma_1 ds grows like T^3/3 while the energy stays T/2, so
// the ratio diverges ~ 2T^2/3: no horizon-uniform variance bound exists.
// ---------------------------------------------------------------------------

void run_poincare_failure(Ctx& c) {
  const Manifold M = Manifold::euclidean(1);
  const double dt = c.d("dt");
  const std::size_t n = std::size_t(c.i("n_paths"));
  std::vector<double> Ts = c.list("t_list");
  if (Ts.empty()) Ts = {1.0, 2.0, 4.0, 8.0};
  std::sort(Ts.begin(), Ts.end());
  const double horizon = Ts.back();
  std::vector<int> nodes;
  for (double T : Ts) nodes.push_back(grid_steps(T, dt));

  MatrixXd rec = Ensemble::run(
      n, int(Ts.size()), c.seed, "poincare-failure",
      [&](std::size_t, RngStream& rng, Eigen::Ref<Eigen::RowVectorXd> row) {
        double running = 0.0;  // plain node sum; trapezoid = dt*(sum - x_K/2), x_0 = 0
        std::size_t next = 0;
        walk_bm(M, Vec(Vec::Zero(1)), Mat(Mat::Identity(1, 1)), horizon, dt, rng,
                [&](int k, const Vec& x, const Mat&, const Vec&) {
                  running += x[0];
                  if (next < nodes.size() && k == nodes[next]) {
                    row[int(next)] = dt * (running - 0.5 * x[0]);
                    ++next;
                  }
                });
      },
      c.threads);

  CsvWriter details({"T", "var", "var_se", "energy", "ratio", "ratio_target"});
  std::vector<double> logT, logRatio, ratios;
  for (std::size_t i = 0; i < Ts.size(); ++i) {
    double T = Ts[i];
    MonteCarloEstimate v = mc_var(rec.col(int(i)));
    double energy = (T - dt / 2.0) / 2.0;  // deterministic: |DF| = 1 on (0, T]
    double ratio = v.value / energy;
    double target_ratio = 2.0 * T * T / 3.0;
    details.add_row({CsvWriter::num(T), CsvWriter::num(v.value), CsvWriter::num(v.se),
                     CsvWriter::num(energy), CsvWriter::num(ratio),
                     CsvWriter::num(target_ratio)});
    logT.push_back(std::log(T));
    logRatio.push_back(std::log(ratio));
    ratios.push_back(ratio);
    CheckRow& r = c.check_bool("pf-ratio-T" + fmt_num(T),
                               std::abs(ratio - target_ratio) <=
                                   0.05 * target_ratio + 3.0 * v.se / energy,
                               ratio, target_ratio);
    r.se = v.se / energy;
    c.check_bool("pf-varfloor-T" + fmt_num(T), v.value >= 0.95 * T * T * T / 3.0 - 3.0 * v.se,
                 v.value, T * T * T / 3.0);
  }
  double slope = ols_slope(logT, logRatio);
  c.check_tol("pf-slope", slope, 2.0, 0.1);
  details.write(c.path_of("details.csv"));
  c.artifact("details.csv");

  std::vector<double> targets;
  for (double T : Ts) targets.push_back(2.0 * T * T / 3.0);
  c.maybe_plot("plot.svg", "variance-to-energy ratio growth", "T", "Var/E",
               {{"measured", Ts, ratios}, {"2T^2/3", Ts, targets}}, true, true);
}

// ---------------------------------------------------------------------------
// nonergodicity: on the hyperbolic plane the bounded harmonic angle function
// u gives time averages F_T = (1/T) int u whose variance does not vanish as
// T -> infinity, while the energies decay like T^{-2}. u(gamma) is a bounded
// martingale: its increment variance equals the accumulated |grad u|^2.
// ---------------------------------------------------------------------------

void run_nonergodicity(Ctx& c) {
  const Manifold M = Manifold::hyperbolic2();
  const double dt = c.d("dt");
  const std::size_t n = std::size_t(c.i("n_paths"));
  std::vector<double> Ts = c.list("t_list");
  if (Ts.empty()) Ts = {2.0, 4.0, 8.0, 16.0, 32.0};
  std::sort(Ts.begin(), Ts.end());
  const std::vector<double> mart_times = {1.0, 4.0, 16.0};

  std::set<double> cps(Ts.begin(), Ts.end());
  cps.insert(mart_times.begin(), mart_times.end());
  std::vector<double> cp(cps.begin(), cps.end());
  const double horizon = cp.back();
  std::vector<int> nodes;
  for (double t : cp) nodes.push_back(grid_steps(t, dt));
  const int m = int(cp.size());

  Vec o(2);
  o << 0, 1;
  const double u0 = harmonic_h2(o);

  // Columns per checkpoint: trapezoid of u, trapezoid of |grad u|_g^2, u(end).
  MatrixXd rec = Ensemble::run(
      n, 3 * m, c.seed, "nonergodicity",
      [&](std::size_t, RngStream& rng, Eigen::Ref<Eigen::RowVectorXd> row) {
        double sum_u = 0.0, sum_g = 0.0, last_u = 0.0, last_g = 0.0;
        std::size_t next = 0;
        walk_bm(M, o, M.canonical_frame(o), horizon, dt, rng,
                [&](int k, const Vec& x, const Mat&, const Vec&) {
                  double u = harmonic_h2(x);
                  double r = x.norm();
                  double gn = x[1] / (M_PI * r);  // |grad u|_g = y/(pi r)
                  double g2 = gn * gn;
                  sum_u += u;
                  sum_g += g2;
                  last_u = u;
                  last_g = g2;
                  if (next < nodes.size() && k == nodes[next]) {
                    int q = int(next);
                    row[3 * q] = dt * (sum_u - 0.5 * (u0 + last_u));
                    row[3 * q + 1] = dt * (sum_g - 0.5 * (1.0 / (M_PI * M_PI) + last_g));
                    row[3 * q + 2] = last_u;
                    ++next;
                  }
                });
      },
      c.threads);

  CsvWriter details({"T", "var", "var_se", "energy_grad", "energy_grad_se", "energy_mart",
                     "energy_mart_se", "mart_mean", "mart_se"});
  std::vector<double> logT, logE1, vars;
  auto col_of = [&](double t) {
    return int(std::find(cp.begin(), cp.end(), t) - cp.begin());
  };

  for (double T : cp) {
    int q = col_of(T);
    VectorXd Fvals = rec.col(3 * q) / T;
    MonteCarloEstimate var = mc_var(Fvals);
    MonteCarloEstimate Ig = mc_mean(rec.col(3 * q + 1));
    VectorXd mart_sq = (rec.col(3 * q + 2).array() - u0).square();
    MonteCarloEstimate Im = mc_mean(mart_sq);
    double s = 1.0 / (2.0 * T * T);
    double E1 = s * Ig.value, E2 = s * Im.value;
    MonteCarloEstimate um = mc_mean(rec.col(3 * q + 2));
    details.add_row({CsvWriter::num(T), CsvWriter::num(var.value), CsvWriter::num(var.se),
                     CsvWriter::num(E1), CsvWriter::num(s * Ig.se), CsvWriter::num(E2),
                     CsvWriter::num(s * Im.se), CsvWriter::num(um.value),
                     CsvWriter::num(um.se)});

    bool in_list = std::find(Ts.begin(), Ts.end(), T) != Ts.end();
    if (in_list) {
      logT.push_back(std::log(T));
      logE1.push_back(std::log(E1));
      vars.push_back(var.value);
      c.check_bool("ne-var-T" + fmt_num(T), var.value > 0, var.value, 0.0, /*mandatory=*/false);
      // The two energy estimators target the same quantity (martingale
      // increment variance = accumulated squared gradient), paired per path.
      VectorXd d = s * (rec.col(3 * q + 1).array() - mart_sq.array());
      MonteCarloEstimate dm = mc_mean(d);
      c.check_z("ne-crosscheck-T" + fmt_num(T), dm.value, 0.0, dm.se);
    }
    if (std::find(mart_times.begin(), mart_times.end(), T) != mart_times.end()) {
      c.check_z("ne-mart-T" + fmt_num(T), um.value, u0, um.se);
    }
  }

  {
    double Tlast = Ts.back();
    int q = col_of(Tlast);
    MonteCarloEstimate var = mc_var(VectorXd(rec.col(3 * q) / Tlast));
    c.check_bool("ne-varfloor-T" + fmt_num(Tlast),
                 var.value - 3.0 * var.se >= c.d("var_floor"), var.value, c.d("var_floor"));
  }
  double slope = ols_slope(logT, logE1);
  double lo = std::stod(c.s("slope_lo")), hi = std::stod(c.s("slope_hi"));
  c.check_bool("ne-slope", slope >= lo && slope <= hi, slope, -2.0);

  details.write(c.path_of("details.csv"));
  c.artifact("details.csv");
  std::vector<double> E1s;
  for (std::size_t i = 0; i < logE1.size(); ++i) E1s.push_back(std::exp(logE1[i]));
  c.maybe_plot("plot.svg", "time-average variance and energy decay", "T", "value",
               {{"Var(F_T)", Ts, vars}, {"E(F_T,F_T)", Ts, E1s}}, true, true);
}

// ---------------------------------------------------------------------------
// tail-bound: exponential estimate P(sup_{[0,T]} rho(x0, gamma) >= N) <=
// exp(n + c2 - kappa(T) N^2), kappa(T) = e^{-1-2c1 T}/(2T), against empirical
// exceedance frequencies; on the line the empirical frequency is also anchored
// to the exact reflection series.
// ---------------------------------------------------------------------------

namespace {

// P(sup_{[0,1]} |B| >= a) via the alternating reflection series.
double two_sided_exit_prob(double a) {
  auto Phi = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
  double p_stay = 0.0;
  for (int k = -40; k <= 40; ++k) {
    double term = Phi((2.0 * k + 1.0) * a) - Phi((2.0 * k - 1.0) * a);
    p_stay += (k % 2 == 0 ? 1.0 : -1.0) * term;
  }
  return 1.0 - p_stay;
}

double tail_kappa(double T, double c1) { return std::exp(-1.0 - 2.0 * c1 * T) / (2.0 * T); }

}  // namespace

double tail_c2_constant(int n, double c1, double curv_c, double alpha) {
  if (n <= 1) return 0.0;  // the radial term vanishes in dimension one
  auto f = [&](double t) {
    return t * std::sqrt(double(n - 1) * curv_c * (1.0 + std::pow(t, alpha))) -
           2.0 * c1 * t * t;
  };
  double best_t = 0.0, best = 0.0;
  for (int i = 1; i <= 4000; ++i) {
    double t = 20.0 * double(i) / 4000.0;
    double v = f(t);
    if (v > best) {
      best = v;
      best_t = t;
    }
  }
  double a = std::max(0.0, best_t - 0.01), b = best_t + 0.01;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  for (int it = 0; it < 80; ++it) {
    if (f(x1) < f(x2)) {
      a = x1;
      x1 = x2;
      x2 = a + gr * (b - a);
    } else {
      b = x2;
      x2 = x1;
      x1 = b - gr * (b - a);
    }
  }
  return std::max(best, f(0.5 * (a + b)));
}

namespace {

struct TailPart {
  Manifold manifold = Manifold::euclidean(1);
  double dt = 0.0;
  double curv_c = 0.0;
  std::string label;
  bool with_oracle = false;
};

void tail_part(Ctx& c, const TailPart& part, CsvWriter& details) {
  const Manifold& M = part.manifold;
  const double T = 1.0;
  const double c1 = c.d("tail_c1");
  const double alpha = c.d("tail_alpha");
  const std::size_t n = std::size_t(c.i("n_paths"));
  const int dim = M.dim();
  const double c2 = tail_c2_constant(dim, c1, part.curv_c, alpha);
  const double kappa = tail_kappa(T, c1);

  Vec x0 = Vec::Zero(M.rep_dim());
  if (M.kind() == ManifoldKind::Sphere2) x0[2] = 1.0;
  if (M.kind() == ManifoldKind::Hyperbolic2) x0[1] = 1.0;

  MatrixXd rec = Ensemble::run(
      n, 1, c.seed, "tail-bound/" + part.label,
      [&](std::size_t, RngStream& rng, Eigen::Ref<Eigen::RowVectorXd> row) {
        double sup = 0.0;
        walk_bm(M, x0, M.canonical_frame(x0), T, part.dt, rng,
                [&](int, const Vec& x, const Mat&, const Vec&) {
                  double r = M.distance(x0, x);
                  if (r > sup) sup = r;
                });
        row[0] = sup;
      },
      c.threads);

  for (double N : {2.0, 3.0}) {
    double hits = (rec.col(0).array() >= N).cast<double>().sum();
    double p = hits / double(n);
    double se = std::sqrt(std::max(p * (1.0 - p), 1.0 / double(n)) / double(n));
    double bound = std::exp(double(dim) + c2 - kappa * N * N);
    std::string nm = "tb-" + part.label + "-N" + fmt_num(N);
    c.check_le(nm + "-bound", p, bound, se);
    // The grid maximum never sees excursions between monitoring times, so the
    // empirical frequency estimates the discretely monitored exit probability.
    // First-order continuity correction: shift the barrier outward by
    // beta*sqrt(dt) with beta = -zeta(1/2)/sqrt(2*pi) (Broadie-Glasserman-Kou).
    double oracle =
        part.with_oracle ? two_sided_exit_prob(N + 0.5825971579390107 * std::sqrt(part.dt)) : 0.0;
    if (part.with_oracle) {
      c.check_z(nm + "-oracle", p, oracle, se);
    }
    details.add_row({part.label, CsvWriter::num(N), CsvWriter::num(p), CsvWriter::num(se),
                     CsvWriter::num(bound), part.with_oracle ? CsvWriter::num(oracle) : "",
                     CsvWriter::num(c2), CsvWriter::num(kappa)});
  }
}

}  // namespace

void run_tail_bound(Ctx& c) {
  CsvWriter details(
      {"part", "N", "empirical", "se", "bound", "oracle", "c2", "kappa"});
  {
    TailPart p;
    p.manifold = Manifold::euclidean(1);
    p.dt = c.d("tail_dt_fine");
    p.curv_c = c.d("tail_curv_c");
    p.label = "euclid1";
    p.with_oracle = true;
    tail_part(c, p, details);
  }
  {
    TailPart p;
    p.manifold = Manifold::euclidean(2);
    p.dt = c.d("dt");
    p.curv_c = c.d("tail_curv_c");
    p.label = "euclid2";
    tail_part(c, p, details);
  }
  {
    TailPart p;
    p.manifold = Manifold::sphere2();
    p.dt = c.d("dt");
    // The curvature scale in the radial estimate must dominate the actual
    // sectional curvature (|sec| = 1 here).
    p.curv_c = std::max(c.d("tail_curv_c"), 1.0);
    p.label = "sphere2";
    tail_part(c, p, details);
  }
  details.write(c.path_of("details.csv"));
  c.artifact("details.csv");
}

}  // namespace detail
}  // namespace pathspace
