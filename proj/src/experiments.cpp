#include "pathspace/experiments.hpp"

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>

#include "experiments_impl.hpp"
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

double combined_se(double a, double b) { return std::sqrt(a * a + b * b); }

CheckRow& push(Ctx& c, CheckRow row) {
  c.res.checks.push_back(std::move(row));
  return c.res.checks.back();
}

}  // namespace

CheckRow& Ctx::check_z(const std::string& name, double value, double target, double se,
                       bool mandatory) {
  CheckRow r;
  r.name = name;
  r.value = value;
  r.target = target;
  r.se = se;
  if (se > 0) {
    r.z = (value - target) / se;
    r.pass = std::abs(r.z) <= 3.0;
  } else {
    r.z = 0.0;
    r.pass = value == target;
  }
  r.mandatory = mandatory;
  return push(*this, std::move(r));
}

CheckRow& Ctx::check_tol(const std::string& name, double value, double target, double tol,
                         bool mandatory) {
  CheckRow r;
  r.name = name;
  r.value = value;
  r.target = target;
  r.se = tol;
  r.z = 0.0;
  r.pass = std::isfinite(value) && std::abs(value - target) <= tol;
  r.mandatory = mandatory;
  return push(*this, std::move(r));
}

CheckRow& Ctx::check_le(const std::string& name, double value, double bound, double se,
                        bool mandatory) {
  CheckRow r;
  r.name = name;
  r.value = value;
  r.target = bound;
  r.se = se;
  r.z = se > 0 ? (value - bound) / se : 0.0;
  r.pass = std::isfinite(value) && value <= bound + 3.0 * se;
  r.mandatory = mandatory;
  return push(*this, std::move(r));
}

CheckRow& Ctx::check_bool(const std::string& name, bool pass, double value, double target,
                          bool mandatory) {
  CheckRow r;
  r.name = name;
  r.value = value;
  r.target = target;
  r.pass = pass;
  r.mandatory = mandatory;
  return push(*this, std::move(r));
}

void Ctx::artifact(const std::string& filename) { res.artifacts.push_back(path_of(filename)); }

void Ctx::maybe_plot(const std::string& filename, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<SvgSeries>& series, bool log_x, bool log_y) {
  if (!plots) return;
  write_svg_plot(path_of(filename), title, x_label, y_label, series, log_x, log_y);
  artifact(filename);
}

// ---------------------------------------------------------------------------
// bm-stats: sampler statistics.
//   euclidean  — coordinate covariances against min(s, t) on a 4x4 time grid
//   sphere2    — E<x0, gamma(t)> against e^{-t}, with a dt-halving comparison
//   all kinds  — damping transports: closed form and the operator-norm bound
// ---------------------------------------------------------------------------

namespace {

Vec origin_of(const Manifold& M) {
  if (M.kind() == ManifoldKind::Sphere2) {
    Vec p(3);
    p << 0, 0, 1;
    return p;
  }
  if (M.kind() == ManifoldKind::Hyperbolic2) {
    Vec p(2);
    p << 0, 1;
    return p;
  }
  return Vec(Vec::Zero(M.dim()));
}

std::vector<Manifold> manifolds_of(const Ctx& c) {
  std::string m = c.s("manifold");
  if (m == "all")
    return {Manifold::euclidean(2), Manifold::sphere2(), Manifold::hyperbolic2()};
  return {Manifold::by_name(m)};
}

void bm_stats_euclid_cov(Ctx& c) {
  const std::vector<double> times = {0.5, 1.0, 1.5, 2.0};
  const Manifold M = Manifold::euclidean(2);
  const double dt = c.d("dt");
  const std::size_t n = std::size_t(c.i("n_paths"));
  std::vector<int> nodes;
  for (double t : times) nodes.push_back(grid_steps(t, dt));
  const int nt = int(times.size());

  MatrixXd rec = Ensemble::run(
      n, 2 * nt, c.seed, "bm-stats/euclid-cov",
      [&](std::size_t, RngStream& rng, Eigen::Ref<Eigen::RowVectorXd> row) {
        int next = 0;
        walk_bm(M, origin_of(M), M.canonical_frame(origin_of(M)), times.back(), dt, rng,
                [&](int k, const Vec& x, const Mat&, const Vec&) {
                  if (next < nt && k == nodes[next]) {
                    row[2 * next] = x[0];
                    row[2 * next + 1] = x[1];
                    ++next;
                  }
                });
      },
      c.threads);

  // Coordinate pairs: same-coordinate entries over s <= t (symmetric
  // statistic), cross-coordinate entries over all ordered pairs.
  for (int a = 0; a < 2; ++a) {
    for (int b = a; b < 2; ++b) {
      for (int i = 0; i < nt; ++i) {
        for (int j = 0; j < nt; ++j) {
          if (a == b && j < i) continue;
          MonteCarloEstimate e = mc_cov(rec.col(2 * i + a), rec.col(2 * j + b));
          double target = a == b ? std::min(times[i], times[j]) : 0.0;
          c.check_z("euclid-cov-g" + std::to_string(a + 1) + std::to_string(b + 1) + "-s" +
                        fmt_num(times[i]) + "-t" + fmt_num(times[j]),
                    e.value, target, e.se);
        }
      }
    }
  }
}

void bm_stats_sphere_decay(Ctx& c) {
  const std::vector<double> times = {0.25, 0.5, 1.0};
  const Manifold M = Manifold::sphere2();
  const Vec x0 = origin_of(M);
  const std::size_t n = std::size_t(c.i("n_paths"));
  const double dt = c.d("dt");

  auto run_at = [&](double step, const std::string& tag) {
    std::vector<int> nodes;
    for (double t : times) nodes.push_back(grid_steps(t, step));
    return Ensemble::run(
        n, int(times.size()), c.seed, tag,
        [&](std::size_t, RngStream& rng, Eigen::Ref<Eigen::RowVectorXd> row) {
          int next = 0;
          walk_bm(M, x0, M.canonical_frame(x0), times.back(), step, rng,
                  [&](int k, const Vec& x, const Mat&, const Vec&) {
                    if (next < int(times.size()) && k == nodes[next]) {
                      row[next] = x0.dot(x);
                      ++next;
                    }
                  });
        },
        c.threads);
  };

  MatrixXd full = run_at(dt, "bm-stats/sphere-decay");
  MatrixXd half = run_at(dt / 2.0, "bm-stats/sphere-decay-half");

  std::vector<double> mean_curve;
  for (std::size_t i = 0; i < times.size(); ++i) {
    double target = std::exp(-times[i]);
    MonteCarloEstimate ef = mc_mean(full.col(int(i)));
    MonteCarloEstimate eh = mc_mean(half.col(int(i)));
    mean_curve.push_back(ef.value);
    // |mean - e^{-t}| <= 3 se + 0.01 (discretization allowance).
    CheckRow& r = c.check_bool("sphere-decay-t" + fmt_num(times[i]),
                               std::abs(ef.value - target) <= 0.01 + 3.0 * ef.se, ef.value,
                               target);
    r.se = ef.se;
    r.z = ef.z_against(target);
    // Halving dt must not make things worse beyond the sampling noise of the
    // two independent runs.
    double err_full = std::abs(ef.value - target);
    double err_half = std::abs(eh.value - target);
    c.check_bool("sphere-decay-halving-t" + fmt_num(times[i]),
                 err_half <= err_full + 2.0 * combined_se(ef.se, eh.se), err_half, err_full);
  }

  std::vector<double> exact;
  for (double t : times) exact.push_back(std::exp(-t));
  c.maybe_plot("plot.svg", "heat-kernel decay of E<x0,gamma(t)>", "t", "E<x0,gamma(t)>",
               {{"sampled", times, mean_curve}, {"exp(-t)", times, exact}});
}

void bm_stats_damping(Ctx& c, const Manifold& M) {
  const double dt = c.d("dt");
  const double K = M.ricci_lower_bound();
  RngStream rng = RngStream::for_lane(c.seed, "bm-stats/damping-" + M.name(), 0);
  Vec x0 = origin_of(M);
  FramedPath path = sample_bm(M, x0, M.canonical_frame(x0), 1.0, dt, rng);
  std::vector<Mat> Ms = damping_matrices(path);

  // Constant curvature: the transport is exactly exp(-K t / 2) I.
  double max_dev = 0.0;
  for (int k = 0; k <= path.steps(); ++k) {
    Mat expect = std::exp(-K * path.time(k) / 2.0) * Mat::Identity(M.dim(), M.dim());
    max_dev = std::max(max_dev, (Ms[std::size_t(k)] - expect).norm());
  }
  c.check_tol("damping-" + M.name() + "-closed-form", max_dev, 0.0, 1e-8);

  // Operator-norm bound ||M_s^{-1} M_r|| <= e^{-K (r-s)/2} (1 + 1e-9) on
  // randomly drawn grid pairs s < r.
  double max_excess = 0.0;
  int N = path.steps();
  for (int trial = 0; trial < 1000; ++trial) {
    int k1 = int(rng.uniform() * N);
    int k2 = k1 + 1 + int(rng.uniform() * (N - k1));
    if (k2 > N) k2 = N;
    Mat ratio = Ms[std::size_t(k1)].partialPivLu().solve(Ms[std::size_t(k2)]);
    double sigma = ratio.jacobiSvd().singularValues()(0);
    double bound = std::exp(-K * (path.time(k2) - path.time(k1)) / 2.0);
    max_excess = std::max(max_excess, sigma / bound - 1.0);
  }
  c.check_le("damping-" + M.name() + "-op-bound", max_excess, 1e-9, 0.0);
}

}  // namespace

void run_bm_stats(Ctx& c) {
  for (const Manifold& M : manifolds_of(c)) {
    if (M.kind() == ManifoldKind::Euclidean) bm_stats_euclid_cov(c);
    if (M.kind() == ManifoldKind::Sphere2) bm_stats_sphere_decay(c);
    bm_stats_damping(c, M);
  }
}

// ---------------------------------------------------------------------------
// ibp: both sides of the integration-by-parts identity across
// (manifold) x (3 cylinder functions) x (2 directions), with the adapted
// truncation on the hyperbolic plane, plus the flat analytic case where the
// left side is exactly 1/2 path by path.
// ---------------------------------------------------------------------------

namespace {

struct IbpSuite {
  Manifold manifold = Manifold::euclidean(2);
  std::vector<std::string> f_ids;
  std::vector<std::string> h_ids;
  CutoffParams cutoff;
};

void ibp_run_suite(Ctx& c, const IbpSuite& suite, CsvWriter& details) {
  const Manifold& M = suite.manifold;
  const double dt = c.d("dt");
  const std::size_t n = std::size_t(c.i("n_paths"));
  const Vec o = origin_of(M);

  std::vector<CylinderFunction> Fs;
  for (const std::string& id : suite.f_ids) Fs.push_back(make_cylinder(M, id));
  std::vector<DirectionField> hs;
  double support = 0.0;
  for (const std::string& id : suite.h_ids) {
    hs.push_back(make_direction(M.dim(), id));
    support = std::max(support, hs.back().support);
  }
  const std::size_t combos = Fs.size() * hs.size();

  MatrixXd rec = Ensemble::run(
      n, int(2 * combos), c.seed, "ibp/" + M.name(),
      [&](std::size_t, RngStream& rng, Eigen::Ref<Eigen::RowVectorXd> row) {
        static thread_local FramedPath path;
        sample_bm_into(path, M, o, M.canonical_frame(o), support, dt, rng);
        std::vector<IbpTerms> terms = ibp_suite_terms(Fs, hs, path, suite.cutoff, o);
        for (std::size_t q = 0; q < combos; ++q) {
          row[int(2 * q)] = terms[q].lhs;
          row[int(2 * q + 1)] = terms[q].rhs;
        }
      },
      c.threads);

  for (std::size_t i = 0; i < Fs.size(); ++i) {
    for (std::size_t j = 0; j < hs.size(); ++j) {
      std::size_t q = i * hs.size() + j;
      MonteCarloEstimate lhs = mc_mean(rec.col(int(2 * q)));
      MonteCarloEstimate rhs = mc_mean(rec.col(int(2 * q + 1)));
      VectorXd diff = rec.col(int(2 * q)) - rec.col(int(2 * q + 1));
      MonteCarloEstimate paired = mc_mean(diff);
      double comb = combined_se(lhs.se, rhs.se);
      std::string name = "ibp-" + M.name() + "-" + Fs[i].id + "-" + hs[j].id;
      c.check_z(name, lhs.value, rhs.value, comb);
      details.add_row({M.name(), Fs[i].id, hs[j].id, CsvWriter::num(lhs.value),
                       CsvWriter::num(lhs.se), CsvWriter::num(rhs.value), CsvWriter::num(rhs.se),
                       CsvWriter::num(paired.value), CsvWriter::num(paired.se)});

      if (M.kind() == ManifoldKind::Euclidean && Fs[i].id == "lin-x1-t1" &&
          hs[j].id == "ramp-e1") {
        // Flat analytic case. The window gradient carries no mass at s = 0,
        // so the left side is the right-endpoint sum dt * sum_{k=1}^{K} t_k
        // = T(T+dt)/2 with T = 1, identically on every path; the exact
        // discrete expectation of the right side (a Gaussian
        // integration-by-parts in the increments) is the same number.
        const double half_exact = 0.5 * (1.0 + dt);
        c.check_bool("ibp-analytic-lhs", std::abs(lhs.value - half_exact) <= 3.0 * lhs.se + 1e-12,
                     lhs.value, half_exact);
        c.check_z("ibp-analytic-rhs", rhs.value, half_exact, rhs.se);
      }
    }
  }
}

}  // namespace

void run_ibp(Ctx& c) {
  CsvWriter details({"manifold", "function", "direction", "lhs", "lhs_se", "rhs", "rhs_se",
                     "paired_diff", "paired_se"});
  for (const Manifold& M : manifolds_of(c)) {
    IbpSuite suite;
    suite.manifold = M;
    suite.h_ids = {"ramp-e1", "bump-e2"};
    switch (M.kind()) {
      case ManifoldKind::Euclidean:
        suite.f_ids = {"lin-x1-t1", "tanh-x1-t1", "exp-x1-t1", "exp2-x1-gauss"};
        break;
      case ManifoldKind::Sphere2:
        suite.f_ids = {"exp-z-t1", "tanh-xy-t05", "exp2-p0-z"};
        break;
      case ManifoldKind::Hyperbolic2:
        suite.f_ids = {"exp-slope-t1", "tanh-angle-t1", "exp2-slope-logy"};
        // Negative curvature requires the adapted truncation; keep the
        // temporal hat at full height over the direction support so the
        // spatial exit radius is the active mechanism.
        suite.cutoff.m = c.d("cutoff_m");
        suite.cutoff.T = std::max(c.d("cutoff_T"), 2.0);
        break;
    }
    ibp_run_suite(c, suite, details);
  }
  details.write(c.path_of("details.csv"));
  c.artifact("details.csv");
}

// ---------------------------------------------------------------------------
// dirichlet-form: gradient pairings.
//   * flat exact value E(F,F) = (T - dt/2)/2 for the running-integral function
//   * table of E(F,F) across the positive suite
//   * initial-frame independence (z-test between two frame choices)
// ---------------------------------------------------------------------------

namespace {

double half_energy(const CylinderFunction& F, const FramedPath& path) {
  GradientSeries G = gradient_series(F, path);
  return 0.5 * gradient_inner(G, G, path.dt);
}

}  // namespace

void run_dirichlet_form(Ctx& c) {
  const double dt = c.d("dt");
  const std::size_t n = std::size_t(c.i("n_paths"));

  {
    // Deterministic flat case: straight path, identity frames. DF == e1 on
    // (0, T], so the trapezoid energy is exactly (T - dt/2)/2.
    Manifold E1 = Manifold::euclidean(1);
    FramedPath flat;
    flat.manifold = E1;
    flat.dt = dt;
    int N = grid_steps(1.0, dt);
    flat.points.assign(std::size_t(N + 1), Vec(Vec::Zero(1)));
    flat.frames.assign(std::size_t(N + 1), Mat(Mat::Identity(1, 1)));
    flat.increments.assign(std::size_t(N), Vec(Vec::Zero(1)));
    CylinderFunction F = make_cylinder(E1, "lin-x1-t1");
    double e = half_energy(F, flat);
    c.check_tol("dirichlet-flat-exact", e, (1.0 - dt / 2.0) / 2.0, 1e-12);
    c.check_tol("dirichlet-flat-halfnorm", e, 0.5, dt);
  }

  const Manifold M = Manifold::sphere2();
  const Vec x0 = origin_of(M);
  std::vector<std::string> ids = cylinder_suite_positive(M);
  std::vector<CylinderFunction> Fs;
  for (const std::string& id : ids) Fs.push_back(make_cylinder(M, id));

  MatrixXd rec = Ensemble::run(
      n, int(Fs.size()), c.seed, "dirichlet-form/suite",
      [&](std::size_t, RngStream& rng, Eigen::Ref<Eigen::RowVectorXd> row) {
        static thread_local FramedPath path;
        sample_bm_into(path, M, x0, M.canonical_frame(x0), 1.0, dt, rng);
        for (std::size_t i = 0; i < Fs.size(); ++i) row[int(i)] = half_energy(Fs[i], path);
      },
      c.threads);

  CsvWriter table({"function", "energy", "energy_se"});
  bool all_ok = true;
  for (std::size_t i = 0; i < Fs.size(); ++i) {
    MonteCarloEstimate e = mc_mean(rec.col(int(i)));
    table.add_row({Fs[i].id, CsvWriter::num(e.value), CsvWriter::num(e.se)});
    all_ok = all_ok && std::isfinite(e.value) && e.value >= 0.0;
  }
  table.write(c.path_of("details.csv"));
  c.artifact("details.csv");
  c.check_bool("dirichlet-suite-nonneg", all_ok, all_ok ? 1.0 : 0.0, 1.0);

  // Frame independence: the energies are functions of the path law only, so
  // developing from a rotated initial frame must give the same numbers up to
  // Monte Carlo error (the two runs use independent randomness).
  Mat rot(2, 2);
  double th = 0.7;
  rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  Mat U0 = M.canonical_frame(x0);
  Mat U0r = U0 * rot;
  std::vector<CylinderFunction> Fpair = {make_cylinder(M, "exp-z-t1"),
                                         make_cylinder(M, "exp-xy-t1")};
  auto frame_run = [&](const Mat& U, const std::string& tag) {
    return Ensemble::run(
        n, int(Fpair.size()), c.seed, tag,
        [&](std::size_t, RngStream& rng, Eigen::Ref<Eigen::RowVectorXd> row) {
          static thread_local FramedPath path;
          sample_bm_into(path, M, x0, U, 1.0, dt, rng);
          for (std::size_t i = 0; i < Fpair.size(); ++i) row[int(i)] = half_energy(Fpair[i], path);
        },
        c.threads);
  };
  MatrixXd ra = frame_run(U0, "dirichlet-form/frame-a");
  MatrixXd rb = frame_run(U0r, "dirichlet-form/frame-b");
  for (std::size_t i = 0; i < Fpair.size(); ++i) {
    MonteCarloEstimate ea = mc_mean(ra.col(int(i)));
    MonteCarloEstimate eb = mc_mean(rb.col(int(i)));
    c.check_z("dirichlet-frame-indep-" + Fpair[i].id, ea.value, eb.value,
              combined_se(ea.se, eb.se));
  }
}

// ---------------------------------------------------------------------------
// grad-expectation: the damped two-sided gradient integral J as an estimator
// of d/dx E_x[F], cross-checked against central finite differences of E_x[F]
// with common random numbers, componentwise in the initial frame.
// ---------------------------------------------------------------------------

namespace {

void grad_exp_manifold(Ctx& c, const Manifold& M, const Vec& x,
                       const std::vector<std::string>& f_ids, CsvWriter& details) {
  const double dt = c.d("dt");
  const double eps = c.d("fd_step");
  const std::size_t n = std::size_t(c.i("n_paths"));
  const int d = M.dim();
  const Mat U0 = M.canonical_frame(x);

  std::vector<CylinderFunction> Fs;
  for (const std::string& id : f_ids) Fs.push_back(make_cylinder(M, id));
  double Tf = 0.0, Tb = 0.0;
  for (const CylinderFunction& F : Fs) {
    Tf = std::max(Tf, F.max_forward_T());
    Tb = std::max(Tb, F.max_backward_T());
  }

  const std::string tag = "grad-expectation/" + M.name();  // shared: common random numbers

  // Base ensemble: per-path damped gradient integrals (d components per F).
  MatrixXd base = Ensemble::run(
      n, int(Fs.size()) * d, c.seed, tag,
      [&](std::size_t, RngStream& rng, Eigen::Ref<Eigen::RowVectorXd> row) {
        TwoSidedPath path = sample_two_sided(M, x, U0, Tf, Tb, dt, rng);
        for (std::size_t i = 0; i < Fs.size(); ++i) {
          Vec J = damped_gradient_integral(Fs[i], path);
          for (int k = 0; k < d; ++k) row[int(i) * d + k] = J[k];
        }
      },
      c.threads);

  // Shifted ensembles: F-values from starts exp(x, +-eps U0 e_k), frame
  // carried by transport, same per-lane increments as the base run.
  auto shifted = [&](int comp, double sign) {
    Vec xs = M.exp(x, sign * eps * U0.col(comp));
    Mat Us(U0.rows(), U0.cols());
    for (int cidx = 0; cidx < U0.cols(); ++cidx) Us.col(cidx) = M.transport(x, xs, U0.col(cidx));
    M.orthonormalize(xs, Us);
    return Ensemble::run(
        n, int(Fs.size()), c.seed, tag,
        [&](std::size_t, RngStream& rng, Eigen::Ref<Eigen::RowVectorXd> row) {
          TwoSidedPath path = sample_two_sided(M, xs, Us, Tf, Tb, dt, rng);
          for (std::size_t i = 0; i < Fs.size(); ++i) row[int(i)] = eval_cylinder(Fs[i], path);
        },
        c.threads);
  };

  for (int k = 0; k < d; ++k) {
    MatrixXd plus = shifted(k, +1.0);
    MatrixXd minus = shifted(k, -1.0);
    for (std::size_t i = 0; i < Fs.size(); ++i) {
      MonteCarloEstimate J = mc_mean(base.col(int(i) * d + k));
      VectorXd fd_paths = (plus.col(int(i)) - minus.col(int(i))) / (2.0 * eps);
      MonteCarloEstimate FD = mc_mean(fd_paths);
      std::string name = "ge-" + M.name() + "-" + Fs[i].id + "-c" + std::to_string(k);
      c.check_z(name, J.value, FD.value, combined_se(J.se, FD.se));
      details.add_row({M.name(), Fs[i].id, std::to_string(k), CsvWriter::num(J.value),
                       CsvWriter::num(J.se), CsvWriter::num(FD.value), CsvWriter::num(FD.se)});
    }
  }
}

}  // namespace

void run_grad_expectation(Ctx& c) {
  CsvWriter details(
      {"manifold", "function", "component", "estimator", "estimator_se", "fd", "fd_se"});
  {
    Manifold M = Manifold::sphere2();
    Vec x(3);
    x << 0.25, -0.4, 0.88;
    x /= x.norm();
    grad_exp_manifold(c, M, x, {"ts-exp-z", "ts-exp-xy-z"}, details);
  }
  {
    Manifold M = Manifold::euclidean(2);
    Vec x(2);
    x << 0.3, -0.2;
    grad_exp_manifold(c, M, x, {"ts-exp-x1"}, details);
  }
  details.write(c.path_of("details.csv"));
  c.artifact("details.csv");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Registry and driver.
// ---------------------------------------------------------------------------

const std::vector<std::string>& experiment_ids() {
  static const std::vector<std::string> ids = {
      "bm-stats",       "ibp",           "dirichlet-form",   "lsi",
      "poincare",       "poincare-failure", "ergodicity",    "nonergodicity",
      "spde-invariance", "covariance-limit", "tail-bound",   "stationarity",
      "shift-invariance", "grad-expectation"};
  return ids;
}

ExperimentResult run_experiment(const std::string& id, const Config& cfg) {
  using Runner = void (*)(detail::Ctx&);
  static const std::map<std::string, Runner> table = {
      {"bm-stats", detail::run_bm_stats},
      {"ibp", detail::run_ibp},
      {"dirichlet-form", detail::run_dirichlet_form},
      {"lsi", detail::run_lsi},
      {"poincare", detail::run_poincare},
      {"poincare-failure", detail::run_poincare_failure},
      {"ergodicity", detail::run_ergodicity},
      {"nonergodicity", detail::run_nonergodicity},
      {"spde-invariance", detail::run_spde_invariance},
      {"covariance-limit", detail::run_covariance_limit},
      {"tail-bound", detail::run_tail_bound},
      {"stationarity", detail::run_stationarity},
      {"shift-invariance", detail::run_shift_invariance},
      {"grad-expectation", detail::run_grad_expectation},
  };
  auto it = table.find(id);
  if (it == table.end()) throw ConfigError("unknown experiment: " + id);

  detail::Ctx c;
  c.cfg = cfg.merged_with_defaults();
  {
    std::vector<Diagnostic> diags = c.cfg.validate();
    if (!diags.empty()) {
      std::string msg = "invalid configuration";
      for (const Diagnostic& d : diags) msg += "\n  " + d.field + ": " + d.message;
      throw ConfigError(msg);
    }
  }
  c.id = id;
  c.seed = c.cfg.get_seed("master_seed");
  c.dir = c.cfg.get_string("out") + "/" + id + "/" + std::to_string(c.seed);
  c.threads = resolve_threads(c.cfg);
  c.plots = c.cfg.get_int("plots") != 0;
  ensure_dir(c.dir);
  c.res.id = id;
  c.res.seed = c.seed;

  auto t0 = std::chrono::steady_clock::now();
  it->second(c);
  c.res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  bool pass = true;
  int failed = 0;
  for (const CheckRow& r : c.res.checks) {
    if (!r.pass) ++failed;
    if (r.mandatory && !r.pass) pass = false;
  }
  c.res.pass = pass;

  CsvWriter csv({"check", "value", "target", "se", "z", "pass", "mandatory"});
  for (const CheckRow& r : c.res.checks) {
    csv.add_row({r.name, CsvWriter::num(r.value), CsvWriter::num(r.target), CsvWriter::num(r.se),
                 CsvWriter::num(r.z), r.pass ? "1" : "0", r.mandatory ? "1" : "0"});
  }
  csv.write(c.path_of("results.csv"));
  c.res.artifacts.insert(c.res.artifacts.begin(), c.path_of("results.csv"));

  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("experiment", id);
  kv.emplace_back("seed", std::to_string(c.seed));
  kv.emplace_back("verdict", pass ? "PASS" : "FAIL");
  kv.emplace_back("checks_total", std::to_string(c.res.checks.size()));
  kv.emplace_back("checks_failed", std::to_string(failed));
  kv.emplace_back("wall_seconds", format_g17(c.res.wall_seconds));
  for (const CheckRow& r : c.res.checks) {
    kv.emplace_back("check." + r.name, std::string(r.pass ? "PASS" : "FAIL") +
                                           (r.mandatory ? "" : " (informational)"));
  }
  write_summary(c.path_of("summary.txt"), kv);
  c.res.artifacts.push_back(c.path_of("summary.txt"));
  return c.res;
}

}  // namespace pathspace
