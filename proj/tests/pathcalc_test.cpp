#include <doctest.h>

#include <cmath>
#include <vector>

#include "pathspace/pathcalc.hpp"

using namespace pathspace;

namespace {

Vec origin_of(const Manifold& M) {
  Vec o = Vec::Zero(M.rep_dim());
  if (M.kind() == ManifoldKind::Sphere2) o[2] = 1.0;
  if (M.kind() == ManifoldKind::Hyperbolic2) o[1] = 1.0;
  return o;
}

// Deterministic flat path x(t) = c * t on Euclidean(1).
FramedPath line_path(double c, double T, double dt) {
  FramedPath p;
  p.manifold = Manifold::euclidean(1);
  p.dt = dt;
  int N = grid_steps(T, dt);
  for (int k = 0; k <= N; ++k) {
    Vec x(1);
    x << c * k * dt;
    p.points.push_back(x);
    p.frames.push_back(Mat::Identity(1, 1));
    if (k > 0) {
      Vec d(1);
      d << c * dt;
      p.increments.push_back(d);
    }
  }
  return p;
}

FramedPath prefix_of(const FramedPath& p, int steps) {
  FramedPath q;
  q.manifold = p.manifold;
  q.dt = p.dt;
  q.points.assign(p.points.begin(), p.points.begin() + steps + 1);
  q.frames.assign(p.frames.begin(), p.frames.begin() + steps + 1);
  q.increments.assign(p.increments.begin(), p.increments.begin() + steps);
  return q;
}

double trap_weight(int k, int last, double dt) { return (k == 0 || k == last) ? 0.5 * dt : dt; }

}  // namespace

TEST_CASE("trivial cutoff parameters give the constant multiplier one") {
  RngStream rng(1);
  Manifold S = Manifold::sphere2();
  Vec pole = origin_of(S);
  FramedPath p = sample_bm(S, pole, S.canonical_frame(pole), 1.0, 0.01, rng);
  CutoffParams cp;
  CHECK(cp.trivial());
  CutoffSeries cs = cutoff_series(p, pole, cp);
  REQUIRE(int(cs.l.size()) == p.steps() + 1);
  for (double l : cs.l) CHECK(l == 1.0);
  for (double lp : cs.lprime) CHECK(lp == 0.0);
}

TEST_CASE("cutoff shape on a deterministic outward ray") {
  // x(t) = t so rho_hat(t) = t/2: with m = 2 the multiplier is 1 until t = 2
  // (running radius 1 = m-1), falls linearly in the radius, 0 from t = 4 on.
  FramedPath p = line_path(1.0, 5.0, 0.5);
  Vec o = Vec::Zero(1);
  CutoffParams cp;
  cp.m = 2.0;
  SUBCASE("spatial mechanism") {
    CutoffSeries cs = cutoff_series(p, o, cp);
    for (int k = 0; k <= p.steps(); ++k) {
      double t = p.time(k);
      double expect = t <= 2.0 ? 1.0 : std::max(0.0, 2.0 - t / 2.0);
      CHECK(cs.l[k] == doctest::Approx(expect).epsilon(1e-12));
    }
    // Backward-difference derivative, zero at the first node.
    CHECK(cs.lprime[0] == 0.0);
    for (int k = 1; k <= p.steps(); ++k)
      CHECK(cs.lprime[k] == doctest::Approx((cs.l[k] - cs.l[k - 1]) / p.dt).epsilon(1e-12));
  }
  SUBCASE("temporal hat mechanism") {
    CutoffParams hat;
    hat.T = 1.0;
    CutoffSeries cs = cutoff_series(p, o, hat);
    for (int k = 0; k <= p.steps(); ++k) {
      double t = p.time(k);
      double expect = t <= 1.0 ? 1.0 : std::max(0.0, 2.0 - t);
      CHECK(cs.l[k] == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("the cutoff is adapted: prefixes replay exactly") {
  Manifold H = Manifold::hyperbolic2();
  Vec o = origin_of(H);
  RngStream rng(12);
  FramedPath p = sample_bm(H, o, H.canonical_frame(o), 2.0, 0.01, rng);
  CutoffParams cp;
  cp.m = 1.2;
  cp.T = 1.5;
  CutoffSeries full = cutoff_series(p, o, cp);
  for (int steps : {50, 120, 199}) {
    FramedPath q = prefix_of(p, steps);
    CutoffSeries part = cutoff_series(q, o, cp);
    for (int k = 0; k <= steps; ++k) {
      CHECK(part.l[k] == full.l[k]);
      CHECK(part.lprime[k] == full.lprime[k]);
    }
  }
}

TEST_CASE("gradient series of the linear window is the indicator in frame coordinates") {
  RngStream rng(21);
  Manifold E = Manifold::euclidean(1);
  FramedPath p = sample_bm(E, Vec::Zero(1), Mat::Identity(1, 1), 2.0, 0.001, rng);
  CylinderFunction F = make_cylinder(E, "lin-x1-t1");
  GradientSeries G = gradient_series(F, p);
  REQUIRE(int(G.fwd.size()) == p.steps() + 1);
  CHECK(G.bwd.empty());
  int K = p.node_at(1.0);
  CHECK(G.fwd[0].norm() == 0.0);  // no mass at s = 0
  for (int k = 1; k <= p.steps(); ++k) {
    double expect = k <= K ? 1.0 : 0.0;
    CHECK(G.fwd[k][0] == expect);
  }
}

TEST_CASE("gradient_inner on the indicator gradient has the closed trapezoid value") {
  RngStream rng(22);
  Manifold E = Manifold::euclidean(1);
  CylinderFunction F = make_cylinder(E, "lin-x1-t1");
  const double dt = 0.001;
  // Horizon equal to the window: the endpoint node carries half weight.
  FramedPath p1 = sample_bm(E, Vec::Zero(1), Mat::Identity(1, 1), 1.0, dt, rng);
  GradientSeries G1 = gradient_series(F, p1);
  CHECK(gradient_inner(G1, G1, dt) == doctest::Approx(1.0 - dt / 2.0).epsilon(1e-12));
  // Longer horizon: the window-end node is interior, full weight.
  FramedPath p2 = sample_bm(E, Vec::Zero(1), Mat::Identity(1, 1), 2.0, dt, rng);
  GradientSeries G2 = gradient_series(F, p2);
  CHECK(gradient_inner(G2, G2, dt) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("flat analytic directional derivative is the exact right-endpoint sum") {
  RngStream rng(23);
  Manifold E = Manifold::euclidean(2);
  const double dt = 0.001;
  CylinderFunction F = make_cylinder(E, "lin-x1-t1");
  DirectionField h = make_direction(2, "ramp-e1");
  CutoffParams trivial;
  for (int trial = 0; trial < 5; ++trial) {
    FramedPath p = sample_bm(E, Vec::Zero(2), Mat::Identity(2, 2), 2.0, dt, rng);
    IbpTerms t = ibp_terms(F, p, h, trivial, Vec(Vec::Zero(2)));
    CHECK(t.lhs == doctest::Approx(0.5 * (1.0 + dt)).epsilon(1e-12));
  }
}

TEST_CASE("suite evaluation agrees with the single-pair evaluation everywhere") {
  struct Case {
    Manifold M;
    std::vector<std::string> f_ids;
    CutoffParams cp;
  };
  std::vector<Case> cases;
  cases.push_back({Manifold::euclidean(2),
                   {"lin-x1-t1", "tanh-x1-t1", "exp-x1-t1", "exp2-x1-gauss"},
                   CutoffParams{}});
  cases.push_back({Manifold::sphere2(), {"exp-z-t1", "tanh-xy-t05", "exp2-p0-z"}, CutoffParams{}});
  CutoffParams hyper_cp;
  hyper_cp.m = 2.0;
  hyper_cp.T = 2.0;
  cases.push_back(
      {Manifold::hyperbolic2(), {"exp-slope-t1", "tanh-angle-t1", "exp2-slope-logy"}, hyper_cp});

  for (const Case& cs : cases) {
    const Manifold& M = cs.M;
    Vec o = origin_of(M);
    std::vector<CylinderFunction> Fs;
    for (const std::string& id : cs.f_ids) Fs.push_back(make_cylinder(M, id));
    std::vector<DirectionField> hs = {make_direction(M.dim(), "ramp-e1"),
                                      make_direction(M.dim(), "bump-e2")};
    for (int trial = 0; trial < 5; ++trial) {
      RngStream rng = RngStream::for_lane(31, "suite-eq:" + M.name(), trial);
      FramedPath p = sample_bm(M, o, M.canonical_frame(o), 2.0, 0.002, rng);
      std::vector<IbpTerms> suite = ibp_suite_terms(Fs, hs, p, cs.cp, o);
      REQUIRE(suite.size() == Fs.size() * hs.size());
      for (std::size_t i = 0; i < Fs.size(); ++i) {
        for (std::size_t j = 0; j < hs.size(); ++j) {
          IbpTerms one = ibp_terms(Fs[i], p, hs[j], cs.cp, o);
          const IbpTerms& two = suite[i * hs.size() + j];
          CHECK(two.lhs == doctest::Approx(one.lhs).epsilon(1e-13));
          CHECK(two.rhs == doctest::Approx(one.rhs).epsilon(1e-13));
          CHECK(two.F == doctest::Approx(one.F).epsilon(1e-13));
          CHECK(two.theta == doctest::Approx(one.theta).epsilon(1e-13));
        }
      }
    }
  }
}

TEST_CASE("both sides of the identity agree statistically on a small flat ensemble") {
  Manifold E = Manifold::euclidean(1);
  CylinderFunction F = make_cylinder(E, "tanh-x1-t1");
  DirectionField h = make_direction(1, "ramp-e1");
  CutoffParams trivial;
  const int n = 2000;
  double sum = 0, sum2 = 0;
  for (int i = 0; i < n; ++i) {
    RngStream rng = RngStream::for_lane(5, "ibp-mini", i);
    FramedPath p = sample_bm(E, Vec::Zero(1), Mat::Identity(1, 1), 2.0, 0.005, rng);
    IbpTerms t = ibp_terms(F, p, h, trivial, Vec(Vec::Zero(1)));
    double d = t.lhs - t.rhs;
    sum += d;
    sum2 += d * d;
  }
  double mean = sum / n;
  double se = std::sqrt((sum2 / n - mean * mean) / n);
  CHECK(std::abs(mean) < 4.0 * se);
}

TEST_CASE("the Ito sum ignores everything past the direction support") {
  Manifold E = Manifold::euclidean(1);
  CylinderFunction F = make_cylinder(E, "tanh-x1-t1");
  DirectionField h = make_direction(1, "ramp-e1");  // support 2
  CutoffParams trivial;
  RngStream rng(44);
  FramedPath full = sample_bm(E, Vec::Zero(1), Mat::Identity(1, 1), 3.0, 0.01, rng);
  FramedPath clipped = prefix_of(full, full.node_at(2.0));
  IbpTerms a = ibp_terms(F, full, h, trivial, Vec(Vec::Zero(1)));
  IbpTerms b = ibp_terms(F, clipped, h, trivial, Vec(Vec::Zero(1)));
  CHECK(a.theta == doctest::Approx(b.theta).epsilon(1e-14));
  CHECK(a.lhs == doctest::Approx(b.lhs).epsilon(1e-14));
}

TEST_CASE("two-sided quadratures carry the backward sign conventions exactly") {
  // Custom two-sided cylinder: F = I_fwd - I_bwd with g = x on both windows,
  // custom odd direction h(t) = t e1 on [-1,1] tapering to 0 at |t| = 2.
  Manifold E = Manifold::euclidean(1);
  const double dt = 0.001;

  CylinderFunction F;
  F.id = "ts-custom";
  F.manifold = E;
  F.f = [](const Vec& I) { return I[0] - I[1]; };
  F.grad_f = [](const Vec&) {
    Vec g(2);
    g << 1.0, -1.0;
    return g;
  };
  WindowSpec wf, wb;
  wf.T = 1.0;
  wf.g = [](double, const Vec& x) { return x[0]; };
  wf.grad_g = [](double, const Vec&) {
    Vec g(1);
    g << 1.0;
    return g;
  };
  wb = wf;
  wb.backward = true;
  F.windows = {wf, wb};

  DirectionField h;
  h.id = "odd-ramp";
  h.dim = 1;
  h.support = 2.0;
  h.h = [](double t) {
    Vec v(1);
    double a = std::abs(t);
    double m = a <= 1.0 ? a : std::max(0.0, 1.0 - (a - 1.0));
    v << (t < 0 ? -m : m);
    return v;
  };
  h.hprime = [](double t) {
    Vec v(1);
    double s = (0.0 <= t && t < 1.0) ? 1.0 : (1.0 <= t && t < 2.0) ? -1.0 : 0.0;
    if (t < 0.0) s = (-1.0 < t) ? 1.0 : (-2.0 < t) ? -1.0 : 0.0;
    v << s;
    return v;
  };

  // Deterministic two-sided line: x(t) = t on both legs (x(-s) = -s).
  TwoSidedPath p;
  p.fwd = line_path(1.0, 2.0, dt);
  p.bwd = line_path(-1.0, 2.0, dt);

  // Window integrals: forward trapezoid of x = t over (0,1] is 1/2; backward
  // trapezoid of x = s over [-1,0) is -1/2; so F = 1/2 - (-1/2) = 1.
  CHECK(eval_cylinder(F, p) == doctest::Approx(1.0).epsilon(1e-12));

  // Directional derivative: each leg contributes the right-endpoint sum
  // (1 + dt)/2, the backward one because both the gradient weight and the
  // direction flip sign.
  GradientSeries G = gradient_series(F, p);
  CHECK(G.fwd[1][0] == 1.0);
  CHECK(G.bwd[1][0] == -1.0);
  CutoffSeries lf = cutoff_series(p.fwd, Vec(Vec::Zero(1)), CutoffParams{});
  CutoffSeries lb = cutoff_series(p.bwd, Vec(Vec::Zero(1)), CutoffParams{});
  double lhs = directional_derivative(F, G, h, lf, &lb, dt);
  CHECK(lhs == doctest::Approx(1.0 + dt).epsilon(1e-12));

  // A two-sided gradient without a backward cutoff is an error.
  CHECK_THROWS_AS(directional_derivative(F, G, h, lf, nullptr, dt), GeometryError);
}

TEST_CASE("two-sided ibp terms are finite and paired on the sphere") {
  Manifold S = Manifold::sphere2();
  Vec pole = origin_of(S);
  CylinderFunction F = make_cylinder(S, "ts-exp-z");
  DirectionField h = make_direction(2, "ts-ramp-e1");
  CutoffParams trivial;
  RngStream rng(55);
  TwoSidedPath p = sample_two_sided(S, pole, S.canonical_frame(pole), F.max_forward_T(),
                                    F.max_backward_T(), 0.01, rng);
  IbpTerms t = ibp_terms(F, p, h, trivial, pole);
  CHECK(std::isfinite(t.lhs));
  CHECK(std::isfinite(t.rhs));
  CHECK(t.F > 0.0);
  CHECK(t.rhs == doctest::Approx(t.F * t.theta).epsilon(1e-14));
}

TEST_CASE("damped gradient integral reduces to weighted quadrature of the gradient") {
  const double dt = 0.005;
  SUBCASE("flat: damping is the identity") {
    Manifold E = Manifold::euclidean(2);
    CylinderFunction F = make_cylinder(E, "ts-exp-x1");
    RngStream rng(66);
    TwoSidedPath p = sample_two_sided(E, Vec::Zero(2), Mat::Identity(2, 2), F.max_forward_T(),
                                      F.max_backward_T(), dt, rng);
    GradientSeries G = gradient_series(F, p);
    Vec manual = Vec::Zero(2);
    for (int k = 0; k < int(G.fwd.size()); ++k)
      manual += trap_weight(k, int(G.fwd.size()) - 1, dt) * G.fwd[k];
    for (int k = 0; k < int(G.bwd.size()); ++k)
      manual += trap_weight(k, int(G.bwd.size()) - 1, dt) * G.bwd[k];
    Vec J = damped_gradient_integral(F, p);
    CHECK((J - manual).norm() < 1e-12);
  }
  SUBCASE("sphere: damping is the scalar e^{-s/2}") {
    Manifold S = Manifold::sphere2();
    Vec pole = origin_of(S);
    CylinderFunction F = make_cylinder(S, "ts-exp-z");
    RngStream rng(67);
    TwoSidedPath p = sample_two_sided(S, pole, S.canonical_frame(pole), F.max_forward_T(),
                                      F.max_backward_T(), dt, rng);
    GradientSeries G = gradient_series(F, p);
    Vec manual = Vec::Zero(2);
    for (int k = 0; k < int(G.fwd.size()); ++k)
      manual += trap_weight(k, int(G.fwd.size()) - 1, dt) * std::exp(-0.5 * k * dt) * G.fwd[k];
    for (int k = 0; k < int(G.bwd.size()); ++k)
      manual += trap_weight(k, int(G.bwd.size()) - 1, dt) * std::exp(-0.5 * k * dt) * G.bwd[k];
    Vec J = damped_gradient_integral(F, p);
    CHECK((J - manual).norm() < 1e-10);
  }
}
