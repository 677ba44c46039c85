#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>

#include "experiments_impl.hpp"
#include "pathspace/inequalities.hpp"
#include "pathspace/spde.hpp"

namespace pathspace {
namespace detail {

namespace {

std::string fmt_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// spde-invariance: the lattice string dynamics preserves the discrete Wiener
// law.
//   * flat case (gating): start from the exact lattice Brownian law, burn in,
//     and test site covariances against the Euler-chain stationary solution
//   * sphere case (statistical): bounded pair statistics must not drift when
//     the string starts from the geodesic spatial walk
// ---------------------------------------------------------------------------

namespace {

void spde_flat_part(Ctx& c, CsvWriter& details) {
  const int J = c.i("spde_J");
  const double L = c.d("spde_L");
  const double h = L / double(J);
  const double dt = h * h / 4.0;  // half the stability limit
  const double burn = c.d("burn_in");
  const std::size_t n = std::size_t(c.i("n_paths"));
  const Manifold M = Manifold::euclidean(1);
  const Vec origin = Vec::Zero(1);

  const Eigen::MatrixXd C_euler = euler_stationary_covariance(J, h, dt);
  const Eigen::MatrixXd C_cont = stationary_covariance(J, h);

  // Initial conditions drawn from the lattice Brownian law up front (single
  // stream), consumed per lane by row index.
  LatticeGaussian law = lattice_bm_law(J, h);
  RngStream init_rng = RngStream::for_lane(c.seed, "spde-invariance/init", 0);
  Eigen::MatrixXd starts = sample_lattice_gaussian(law, int(n), init_rng);

  std::vector<int> probes = {8, 16, 32, 48, 64};  // sites, 1-based
  probes.erase(std::remove_if(probes.begin(), probes.end(), [&](int p) { return p > J; }),
               probes.end());
  if (probes.size() < 2) throw ConfigError("spde_J too small for the covariance probe set");
  MatrixXd rec = Ensemble::run(
      n, int(probes.size()), c.seed, "spde-invariance/flat",
      [&](std::size_t lane, RngStream& rng, Eigen::Ref<Eigen::RowVectorXd> row) {
        StringState s = make_constant_string(M, StringBoundary::PinnedLeft, J + 1, h, origin);
        for (int j = 1; j <= J; ++j) s.points[std::size_t(j)][0] = starts(int(lane), j - 1);
        evolve_string(s, burn, dt, rng);
        for (std::size_t q = 0; q < probes.size(); ++q)
          row[int(q)] = s.points[std::size_t(probes[q])][0];
      },
      c.threads);

  for (std::size_t a = 0; a < probes.size(); ++a) {
    MonteCarloEstimate m = mc_mean(rec.col(int(a)));
    c.check_z("spde-inv-mean-x" + std::to_string(probes[a]), m.value, 0.0, m.se);
    for (std::size_t b = a; b < probes.size(); ++b) {
      MonteCarloEstimate cv = mc_cov(rec.col(int(a)), rec.col(int(b)));
      double ref = C_euler(probes[a] - 1, probes[b] - 1);
      c.check_z("spde-inv-C-x" + std::to_string(probes[a]) + "-x" + std::to_string(probes[b]),
                cv.value, ref, cv.se);
      details.add_row({"flat", std::to_string(probes[a]), std::to_string(probes[b]),
                       CsvWriter::num(cv.value), CsvWriter::num(cv.se), CsvWriter::num(ref),
                       CsvWriter::num(C_cont(probes[a] - 1, probes[b] - 1))});
    }
  }
}

void spde_sphere_part(Ctx& c, CsvWriter& details) {
  const int J = 32;
  const double L = c.d("spde_L");
  const double h = L / double(J);
  const double dt = h * h / 4.0;
  const double t_run = 0.5;
  const std::size_t n = std::min<std::size_t>(std::size_t(c.i("n_paths")), 2000);
  const Manifold M = Manifold::sphere2();
  Vec origin(3);
  origin << 0, 0, 1;

  const std::vector<std::pair<int, int>> pairs = {{4, 8}, {8, 16}, {16, 32}, {8, 32}};
  MatrixXd rec = Ensemble::run(
      n, int(2 * pairs.size()), c.seed, "spde-invariance/sphere",
      [&](std::size_t, RngStream& rng, Eigen::Ref<Eigen::RowVectorXd> row) {
        StringState s =
            init_geodesic_walk(M, StringBoundary::PinnedLeft, J + 1, h, origin, rng);
        for (std::size_t q = 0; q < pairs.size(); ++q)
          row[int(q)] =
              s.points[std::size_t(pairs[q].first)].dot(s.points[std::size_t(pairs[q].second)]);
        evolve_string(s, t_run, dt, rng);
        for (std::size_t q = 0; q < pairs.size(); ++q)
          row[int(pairs.size() + q)] =
              s.points[std::size_t(pairs[q].first)].dot(s.points[std::size_t(pairs[q].second)]);
      },
      c.threads);

  for (std::size_t q = 0; q < pairs.size(); ++q) {
    VectorXd drift = rec.col(int(pairs.size() + q)) - rec.col(int(q));
    MonteCarloEstimate d = mc_mean(drift);
    // The spatial-walk start is the lattice Wiener measure only up to the
    // intrinsic discretization, so the drift allowance carries an O(h) term.
    CheckRow& r = c.check_bool(
        "spde-inv-sphere-x" + std::to_string(pairs[q].first) + "-x" +
            std::to_string(pairs[q].second),
        std::abs(d.value) <= 3.0 * d.se + 0.05, d.value, 0.0);
    r.se = d.se;
    r.z = d.se > 0 ? d.value / d.se : 0.0;
    details.add_row({"sphere", std::to_string(pairs[q].first), std::to_string(pairs[q].second),
                     CsvWriter::num(d.value), CsvWriter::num(d.se), "0", ""});
  }
}

}  // namespace

void run_spde_invariance(Ctx& c) {
  CsvWriter details({"part", "site_a", "site_b", "value", "se", "reference", "continuum"});
  std::string mf = c.s("manifold");
  if (mf == "all" || mf == "euclidean") spde_flat_part(c, details);
  if (mf == "all" || mf == "sphere2") spde_sphere_part(c, details);
  details.write(c.path_of("details.csv"));
  c.artifact("details.csv");
}

// ---------------------------------------------------------------------------
// covariance-limit: evolve the lattice Brownian law exactly for a long time
// and compare sampled covariances with min(x, y) within the lattice
// resolution h plus sampling error.
// ---------------------------------------------------------------------------

void run_covariance_limit(Ctx& c) {
  const int J = c.i("exact_J");
  const double L = c.d("exact_L");
  const double h = L / double(J);
  const double t = c.d("evolve_t");
  const std::size_t n = std::size_t(c.i("n_paths"));

  LatticeGaussian g0 = lattice_bm_law(J, h);
  LatticeGaussian gt = exact_evolve(g0, t);

  // The Brownian law is exactly stationary under the exact mode flow.
  double dev = (gt.cov - g0.cov).cwiseAbs().maxCoeff() + gt.mean.cwiseAbs().maxCoeff();
  c.check_tol("covlim-exact-stationarity", dev, 0.0, 1e-9);

  RngStream rng = RngStream::for_lane(c.seed, "covariance-limit", 0);
  Eigen::MatrixXd draws = sample_lattice_gaussian(gt, int(n), rng);

  std::vector<double> xs = c.list("x_list");
  for (double x : xs) {
    int i = int(std::llround(x / h));
    if (i < 1 || i > J || std::abs(i * h - x) > 1e-9)
      throw ConfigError("x_list entries must be lattice points in (0, exact_L]");
  }
  CsvWriter details({"x", "y", "cov", "cov_se", "min_xy", "band"});
  for (std::size_t a = 0; a < xs.size(); ++a) {
    int ia = int(std::llround(xs[a] / h));
    MonteCarloEstimate m = mc_mean(draws.col(ia - 1));
    c.check_z("covlim-mean-x" + fmt_num(xs[a]), m.value, 0.0, m.se, /*mandatory=*/false);
    for (std::size_t b = a; b < xs.size(); ++b) {
      int ib = int(std::llround(xs[b] / h));
      MonteCarloEstimate cv = mc_cov(draws.col(ia - 1), draws.col(ib - 1));
      double target = std::min(xs[a], xs[b]);
      CheckRow& r = c.check_bool(
          "covlim-C-x" + fmt_num(xs[a]) + "-x" + fmt_num(xs[b]),
          std::abs(cv.value - target) <= h + 3.0 * cv.se, cv.value, target);
      r.se = cv.se;
      r.z = cv.z_against(target);
      details.add_row({fmt_num(xs[a]), fmt_num(xs[b]), CsvWriter::num(cv.value),
                       CsvWriter::num(cv.se), CsvWriter::num(target),
                       CsvWriter::num(h + 3.0 * cv.se)});
    }
  }
  details.write(c.path_of("details.csv"));
  c.artifact("details.csv");
}

// ---------------------------------------------------------------------------
// ergodicity: closed-form decay of Var(P_t F) for linear and quadratic site
// observables under the exact lattice flow; the slowest relaxation time is
// tau = 1/kappa_1 and the decay rate on [tau, 2 tau] matches 2 kappa_1.
// ---------------------------------------------------------------------------

void run_ergodicity(Ctx& c) {
  const int J = c.i("exact_J");
  const double L = c.d("exact_L");
  const double h = L / double(J);
  DNSpectrum sp = dn_spectrum(J, h);
  const double kappa1 = sp.kappa[0];
  const double tau = 1.0 / kappa1;
  const int site = int(std::llround(1.0 / h));  // observable at x = 1
  if (site < 1 || site > J) throw ConfigError("exact lattice does not contain the site x = 1");

  std::vector<double> times;
  for (int k = 0; k <= 16; ++k) times.push_back(double(k) * tau / 8.0);
  std::vector<double> v_lin = ergodicity_decay_linear(sp, site, times);
  std::vector<double> v_quad = ergodicity_decay_quadratic(sp, site, times);

  c.check_tol("erg-initial-var", v_lin[0], 1.0, 1e-9);  // min(x, x) at x = 1
  bool monotone = true;
  for (std::size_t i = 1; i < v_lin.size(); ++i) monotone = monotone && v_lin[i] < v_lin[i - 1];
  c.check_bool("erg-monotone", monotone, monotone ? 1.0 : 0.0, 1.0);
  c.check_le("erg-decay-1pct", v_lin.back() / v_lin.front(), 0.01, 0.0);

  // Log-linear fit on [tau, 2 tau] (indices 8..16).
  std::vector<double> ts, ll, lq;
  for (std::size_t i = 8; i < times.size(); ++i) {
    ts.push_back(times[i]);
    ll.push_back(std::log(v_lin[i]));
    lq.push_back(std::log(v_quad[i]));
  }
  double slope_lin = ols_slope(ts, ll);
  double slope_quad = ols_slope(ts, lq);
  c.check_tol("erg-rate-linear", slope_lin, -2.0 * kappa1, 0.1 * 2.0 * kappa1);
  c.check_tol("erg-rate-quadratic", slope_quad, -4.0 * kappa1, 0.1 * 4.0 * kappa1);
  c.check_bool("erg-slowest-time", true, tau, tau, /*mandatory=*/false);

  CsvWriter details({"t", "var_linear", "var_quadratic"});
  for (std::size_t i = 0; i < times.size(); ++i) {
    details.add_row({CsvWriter::num(times[i]), CsvWriter::num(v_lin[i]),
                     CsvWriter::num(v_quad[i])});
  }
  details.write(c.path_of("details.csv"));
  c.artifact("details.csv");
  c.maybe_plot("plot.svg", "exact relaxation of site observables", "t", "Var(P_t F)",
               {{"linear", times, v_lin}, {"quadratic", times, v_quad}}, false, true);
}

}  // namespace detail
}  // namespace pathspace
