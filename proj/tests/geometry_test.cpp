#include <doctest.h>

#include <cmath>

#include "pathspace/geometry.hpp"
#include "pathspace/rng.hpp"

using namespace pathspace;

namespace {

const double kPi = 4.0 * std::atan(1.0);

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

Vec v3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

// Independent hyperbolic half-plane distance: cosh d = 1 + (|dx|^2+|dy|^2)/(2 y1 y2).
double h2_distance_reference(const Vec& p, const Vec& q) {
  double num = (p - q).squaredNorm();
  return std::acosh(1.0 + num / (2.0 * p[1] * q[1]));
}

// Christoffel symbols from central finite differences of the chart metric:
// Gamma^k_{ij} = (1/2) g^{kl} (d_i g_{jl} + d_j g_{il} - d_l g_{ij}).
template <class MetricFn>
std::vector<Mat> christoffel_fd(const MetricFn& metric_at, const Vec& p, int dim) {
  const double eps = 1e-6;
  std::vector<Mat> dg(dim);
  for (int a = 0; a < dim; ++a) {
    Vec pp = p, pm = p;
    pp[a] += eps;
    pm[a] -= eps;
    dg[a] = (metric_at(pp) - metric_at(pm)) / (2.0 * eps);
  }
  Mat ginv = metric_at(p).inverse();
  std::vector<Mat> gamma(dim, Mat::Zero(dim, dim));
  for (int k = 0; k < dim; ++k)
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) {
        double s = 0;
        for (int l = 0; l < dim; ++l)
          s += ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        gamma[k](i, j) = 0.5 * s;
      }
  return gamma;
}

}  // namespace

TEST_CASE("euclidean geometry is the identity chart") {
  Manifold M = Manifold::euclidean(3);
  Vec p = v3(0.3, -1.2, 2.0), v = v3(0.5, 0.25, -1.0);
  CHECK((M.exp(p, v) - (p + v)).norm() == doctest::Approx(0.0));
  CHECK((M.log(p, p + v) - v).norm() == doctest::Approx(0.0));
  CHECK(M.distance(p, p + v) == doctest::Approx(v.norm()));
  CHECK((M.transport(p, p + v, v) - v).norm() == 0.0);
  CHECK((M.canonical_frame(p) - Mat::Identity(3, 3)).norm() == 0.0);
  CHECK(M.metric(p, v, v) == doctest::Approx(v.squaredNorm()));
  for (const Mat& g : M.christoffel(p)) CHECK(g.norm() == 0.0);
  CHECK(M.ricci_in_frame(p, M.canonical_frame(p)).norm() == 0.0);
}

TEST_CASE("euclidean dimension limits") {
  CHECK_THROWS_AS(Manifold::euclidean(0), GeometryError);
  CHECK_THROWS_AS(Manifold::euclidean(9), GeometryError);
  CHECK(Manifold::euclidean(8).dim() == 8);
}

TEST_CASE("manifold names round-trip") {
  for (const char* n : {"euclidean1", "euclidean5", "sphere2", "hyperbolic2"}) {
    CHECK(Manifold::by_name(n).name() == n);
  }
  CHECK(Manifold::by_name("euclidean").dim() == 1);
  CHECK_THROWS_AS(Manifold::by_name("torus"), GeometryError);
}

TEST_CASE("sphere exponential map follows great circles") {
  Manifold S = Manifold::sphere2();
  Vec pole = v3(0, 0, 1);
  for (double th : {0.3, 1.2, 2.9}) {
    Vec q = S.exp(pole, v3(th, 0, 0));
    CHECK(q[0] == doctest::Approx(std::sin(th)).epsilon(1e-12));
    CHECK(q[1] == doctest::Approx(0.0));
    CHECK(q[2] == doctest::Approx(std::cos(th)).epsilon(1e-12));
    CHECK(S.distance(pole, q) == doctest::Approx(th).epsilon(1e-12));
  }
  CHECK(S.distance(v3(1, 0, 0), v3(0, 1, 0)) == doctest::Approx(kPi / 2));
}

TEST_CASE("sphere log inverts exp away from the cut locus") {
  Manifold S = Manifold::sphere2();
  RngStream rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    Vec p = v3(rng.normal(), rng.normal(), rng.normal());
    p /= p.norm();
    Vec raw = v3(rng.normal(), rng.normal(), rng.normal());
    Vec v = S.tangent_project(p, raw);
    v *= (0.1 + 2.9 * rng.uniform()) / v.norm();  // length in (0.1, 3.0) < pi
    Vec q = S.exp(p, v);
    CHECK(S.check_point(q));
    CHECK((S.log(p, q) - v).norm() < 1e-9);
    CHECK(S.distance(p, q) == doctest::Approx(v.norm()).epsilon(1e-10));
  }
}

TEST_CASE("sphere cut locus throws and bad points are rejected") {
  Manifold S = Manifold::sphere2();
  CHECK_THROWS_AS(S.log(v3(0, 0, 1), v3(0, 0, -1)), GeometryError);
  CHECK_FALSE(S.check_point(v3(0, 0, 1.01)));
  CHECK_THROWS_AS(S.require_point(v3(0.5, 0.5, 0.5)), GeometryError);
  CHECK((S.rep_project(v3(0, 0, 1.3)) - v3(0, 0, 1)).norm() < 1e-15);
}

TEST_CASE("sphere transport is a metric isometry with closed form along meridians") {
  Manifold S = Manifold::sphere2();
  Vec pole = v3(0, 0, 1);
  double th = 0.8;
  Vec q = S.exp(pole, v3(th, 0, 0));
  // e1 at the pole rotates in the xz-plane; e2 is orthogonal to the motion and rides unchanged.
  CHECK((S.transport(pole, q, v3(1, 0, 0)) - v3(std::cos(th), 0, -std::sin(th))).norm() < 1e-12);
  CHECK((S.transport(pole, q, v3(0, 1, 0)) - v3(0, 1, 0)).norm() < 1e-12);

  RngStream rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Vec p = v3(rng.normal(), rng.normal(), rng.normal());
    p /= p.norm();
    Vec b = v3(rng.normal(), rng.normal(), rng.normal());
    b /= b.norm();
    if (S.distance(p, b) > 3.0) continue;
    Vec v = S.tangent_project(p, v3(rng.normal(), rng.normal(), rng.normal()));
    Vec w = S.tangent_project(p, v3(rng.normal(), rng.normal(), rng.normal()));
    Vec tv = S.transport(p, b, v), tw = S.transport(p, b, w);
    CHECK(S.metric(b, tv, tw) == doctest::Approx(S.metric(p, v, w)).epsilon(1e-10));
    CHECK(std::abs(tv.dot(b)) < 1e-10);  // stays tangent
  }
}

TEST_CASE("hyperbolic distance matches the half-plane closed form") {
  Manifold H = Manifold::hyperbolic2();
  CHECK(H.distance(v2(0, 1), v2(0, std::exp(1.0))) == doctest::Approx(1.0).epsilon(1e-12));
  RngStream rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    Vec p = v2(2.0 * rng.normal(), std::exp(rng.normal()));
    Vec q = v2(2.0 * rng.normal(), std::exp(rng.normal()));
    CHECK(H.distance(p, q) == doctest::Approx(h2_distance_reference(p, q)).epsilon(1e-10));
  }
}

TEST_CASE("hyperbolic exp: vertical geodesics, circles, and log inversion") {
  Manifold H = Manifold::hyperbolic2();
  // Vertical geodesic through (0,1): unit-speed flow is y = e^t.
  for (double s : {0.5, -0.7, 2.0}) {
    Vec q = H.exp(v2(0, 1), v2(0, s));
    CHECK(q[0] == doctest::Approx(0.0));
    CHECK(q[1] == doctest::Approx(std::exp(s)).epsilon(1e-10));
  }
  // Horizontal launch from (0,1): the geodesic is the unit half circle.
  for (double s : {0.3, 1.0, -2.0}) {
    Vec q = H.exp(v2(0, 1), v2(s, 0));
    CHECK(q.squaredNorm() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(q[1] > 0.0);
  }
  RngStream rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    Vec p = v2(rng.normal(), std::exp(rng.normal()));
    Vec v = v2(rng.normal(), rng.normal());
    CHECK(H.distance(p, H.exp(p, v)) == doctest::Approx(H.norm(p, v)).epsilon(1e-9));
    CHECK((H.log(p, H.exp(p, v)) - v).norm() < 1e-8 * (1.0 + v.norm()));
  }
}

TEST_CASE("hyperbolic transport preserves the metric") {
  Manifold H = Manifold::hyperbolic2();
  RngStream rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    Vec p = v2(rng.normal(), std::exp(0.5 * rng.normal()));
    Vec q = v2(rng.normal(), std::exp(0.5 * rng.normal()));
    Vec v = v2(rng.normal(), rng.normal());
    Vec w = v2(rng.normal(), rng.normal());
    CHECK(H.metric(q, H.transport(p, q, v), H.transport(p, q, w)) ==
          doctest::Approx(H.metric(p, v, w)).epsilon(1e-9));
  }
}

TEST_CASE("christoffel symbols agree with metric finite differences") {
  Manifold H = Manifold::hyperbolic2();
  RngStream rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    Vec p = v2(rng.normal(), 0.5 + 2.0 * rng.uniform());
    auto metric_at = [&](const Vec& x) { return H.metric_matrix(x); };
    std::vector<Mat> fd = christoffel_fd(metric_at, p, 2);
    std::vector<Mat> an = H.christoffel(p);
    for (int k = 0; k < 2; ++k) CHECK((fd[k] - an[k]).norm() < 1e-5);
  }
  // Known values at (x, y): Gamma^x_{xy} = -1/y, Gamma^y_{xx} = 1/y, Gamma^y_{yy} = -1/y.
  Vec p = v2(0.4, 2.0);
  std::vector<Mat> an = H.christoffel(p);
  CHECK(an[0](0, 1) == doctest::Approx(-0.5));
  CHECK(an[0](1, 0) == doctest::Approx(-0.5));
  CHECK(an[1](0, 0) == doctest::Approx(0.5));
  CHECK(an[1](1, 1) == doctest::Approx(-0.5));
}

TEST_CASE("sphere polar chart: metric, christoffel, and embedding are consistent") {
  Manifold S = Manifold::sphere2();
  RngStream rng(43);
  for (int trial = 0; trial < 10; ++trial) {
    Vec tp = v2(0.3 + 2.4 * rng.uniform(), 2.0 * kPi * rng.uniform());
    std::vector<Mat> fd = christoffel_fd([](const Vec& x) { return SphereChart::metric_matrix(x); }, tp, 2);
    std::vector<Mat> an = SphereChart::christoffel(tp);
    for (int k = 0; k < 2; ++k) CHECK((fd[k] - an[k]).norm() < 1e-5);

    Vec tq = v2(0.3 + 2.4 * rng.uniform(), 2.0 * kPi * rng.uniform());
    Vec a = SphereChart::embed(tp), b = SphereChart::embed(tq);
    CHECK(S.check_point(a));
    CHECK(S.distance(a, b) == doctest::Approx(std::acos(std::min(1.0, a.dot(b)))).epsilon(1e-9));
  }
}

TEST_CASE("exp solves the geodesic equation in the hyperbolic chart") {
  Manifold H = Manifold::hyperbolic2();
  Vec p = v2(0.2, 1.5), v = v2(0.7, -0.4);
  const double t0 = 0.4, eps = 1e-4;
  Vec gm = H.exp(p, (t0 - eps) * v);
  Vec g0 = H.exp(p, t0 * v);
  Vec gp = H.exp(p, (t0 + eps) * v);
  Vec acc = (gp - 2.0 * g0 + gm) / (eps * eps);
  Vec vel = (gp - gm) / (2.0 * eps);
  std::vector<Mat> gamma = H.christoffel(g0);
  for (int k = 0; k < 2; ++k) {
    double correction = vel.dot(gamma[k] * vel);
    CHECK(std::abs(acc[k] + correction) < 1e-5);
  }
}

TEST_CASE("orthonormalize yields a g-orthonormal frame spanning the same space") {
  RngStream rng(59);
  Manifold H = Manifold::hyperbolic2();
  Vec p = v2(0.3, 0.7);
  Mat F(2, 2);
  F << 1.0, 0.4, 0.2, 1.0;
  Mat orig = F;
  H.orthonormalize(p, F);
  CHECK(H.frame_is_orthonormal(p, F));
  // Same span: original columns expand exactly in the new frame.
  for (int c = 0; c < 2; ++c) {
    Vec coords = H.frame_coords(p, F, orig.col(c));
    CHECK((F * coords - orig.col(c)).norm() < 1e-10);
  }

  Manifold S = Manifold::sphere2();
  Vec q = v3(rng.normal(), rng.normal(), rng.normal());
  q /= q.norm();
  Mat G(3, 2);
  G.col(0) = S.tangent_project(q, v3(rng.normal(), rng.normal(), rng.normal()));
  G.col(1) = S.tangent_project(q, v3(rng.normal(), rng.normal(), rng.normal()));
  S.orthonormalize(q, G);
  CHECK(S.frame_is_orthonormal(q, G));
  CHECK(std::abs(G.col(0).dot(q)) < 1e-12);
  CHECK(std::abs(G.col(1).dot(q)) < 1e-12);
}

TEST_CASE("canonical frames are orthonormal and frame_coords inverts the frame") {
  RngStream rng(61);
  for (const Manifold& M : {Manifold::euclidean(4), Manifold::sphere2(), Manifold::hyperbolic2()}) {
    Vec p;
    if (M.kind() == ManifoldKind::Sphere2) {
      p = v3(rng.normal(), rng.normal(), rng.normal());
      p /= p.norm();
    } else if (M.kind() == ManifoldKind::Hyperbolic2) {
      p = v2(0.4, 1.7);
    } else {
      p = Vec::Zero(4);
    }
    Mat U = M.canonical_frame(p);
    CHECK(M.frame_is_orthonormal(p, U));
    Vec a = Vec::Zero(M.dim());
    for (int i = 0; i < M.dim(); ++i) a[i] = rng.normal();
    Vec w = U * a;
    CHECK((M.frame_coords(p, U, w) - a).norm() < 1e-10);
  }
}

TEST_CASE("ricci operator is the curvature constant times the identity") {
  CHECK(Manifold::euclidean(2).ricci_lower_bound() == 0.0);
  CHECK(Manifold::sphere2().ricci_lower_bound() == 1.0);
  CHECK(Manifold::hyperbolic2().ricci_lower_bound() == -1.0);
  Manifold S = Manifold::sphere2();
  Vec p = v3(0, 0, 1);
  CHECK((S.ricci_in_frame(p, S.canonical_frame(p)) - Mat::Identity(2, 2)).norm() == 0.0);
}

TEST_CASE("distance_clamped truncates at one") {
  Manifold E = Manifold::euclidean(1);
  Vec a(1), b(1);
  a << 0.0;
  b << 0.25;
  CHECK(E.distance_clamped(a, b) == doctest::Approx(0.25));
  b << 7.0;
  CHECK(E.distance_clamped(a, b) == 1.0);
}
