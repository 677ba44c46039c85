#include <doctest.h>

#include <cmath>

#include "pathspace/path.hpp"

using namespace pathspace;

namespace {

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

}  // namespace

TEST_CASE("grid_steps accepts multiples of dt and rejects the rest") {
  CHECK(grid_steps(1.0, 0.001) == 1000);
  CHECK(grid_steps(0.25, 0.25) == 1);
  CHECK_THROWS_AS(grid_steps(0.0015, 0.001), GeometryError);
}

TEST_CASE("euclidean walk sums its own increments with identity frames") {
  Manifold E = Manifold::euclidean(2);
  RngStream rng(101);
  FramedPath p = sample_bm(E, Vec::Zero(2), E.canonical_frame(Vec::Zero(2)), 1.0, 0.01, rng);
  REQUIRE(p.steps() == 100);
  // Stored increments are the raw Gaussian draws; each point is the rounded
  // sum x + delta, so differences match the draws to machine rounding only.
  Vec run = Vec::Zero(2);
  for (int k = 0; k < p.steps(); ++k) {
    run += p.increments[k];
    CHECK((p.points[k + 1] - p.points[k] - p.increments[k]).norm() < 1e-15);
    CHECK((p.frames[k + 1] - Mat::Identity(2, 2)).norm() == 0.0);
  }
  CHECK((p.points.back() - run).norm() < 1e-13);
}

TEST_CASE("euclidean endpoint second moment is n*T") {
  Manifold E = Manifold::euclidean(2);
  const int n_paths = 5000;
  const double T = 1.0, dt = 0.01;
  double sum = 0;
  for (int i = 0; i < n_paths; ++i) {
    RngStream rng = RngStream::for_lane(11, "bm-m2", i);
    Vec x = Vec::Zero(2);
    Mat U = Mat::Identity(2, 2);
    walk_bm(E, x, U, T, dt, rng, [&](int k, const Vec& p, const Mat&, const Vec&) {
      if (k == grid_steps(T, dt)) sum += p.squaredNorm();
    });
  }
  double mean = sum / n_paths;
  // |x_T|^2 is T times a chi-square(2): mean 2T exactly (each increment is an
  // exact Gaussian), variance 2*2*T^2.
  double se = std::sqrt(2.0 * 2.0 * T * T / n_paths);
  CHECK(std::abs(mean - 2.0 * T) < 4.0 * se);
}

TEST_CASE("frames stay orthonormal and points stay on the manifold") {
  RngStream rng(202);
  for (const Manifold& M : {Manifold::euclidean(3), Manifold::sphere2(), Manifold::hyperbolic2()}) {
    Vec x0;
    if (M.kind() == ManifoldKind::Sphere2)
      x0 = v3(0, 0, 1);
    else if (M.kind() == ManifoldKind::Hyperbolic2)
      x0 = v2(0, 1);
    else
      x0 = Vec::Zero(3);
    FramedPath p = sample_bm(M, x0, M.canonical_frame(x0), 0.5, 0.001, rng);
    for (int k = 0; k <= p.steps(); k += 50) {
      CHECK(M.check_point(p.points[k]));
      CHECK(M.frame_is_orthonormal(p.points[k], p.frames[k]));
      if (M.kind() == ManifoldKind::Sphere2) {
        CHECK(std::abs(p.frames[k].col(0).dot(p.points[k])) < 1e-9);
        CHECK(std::abs(p.frames[k].col(1).dot(p.points[k])) < 1e-9);
      }
      if (M.kind() == ManifoldKind::Hyperbolic2) CHECK(p.points[k][1] > 0.0);
    }
  }
}

TEST_CASE("sphere walk reproduces the first eigenfunction decay") {
  Manifold S = Manifold::sphere2();
  Vec pole = v3(0, 0, 1);
  const int n_paths = 3000;
  const double t = 0.5, dt = 0.001;
  double sum = 0, sum2 = 0;
  for (int i = 0; i < n_paths; ++i) {
    RngStream rng = RngStream::for_lane(31, "sphere-decay-unit", i);
    FramedPath p = sample_bm(S, pole, S.canonical_frame(pole), t, dt, rng);
    double c = std::cos(S.distance(pole, p.points.back()));
    sum += c;
    sum2 += c * c;
  }
  double mean = sum / n_paths;
  double var = sum2 / n_paths - mean * mean;
  double se = std::sqrt(var / n_paths);
  // cos(rho) is the lowest spherical harmonic; the heat semigroup damps it by
  // e^{-t} (eigenvalue 2 of -Laplacian, generator Laplacian/2). 0.01 absorbs
  // the O(dt) weak error of the walk.
  CHECK(std::abs(mean - std::exp(-t)) < 3.0 * se + 0.01);
}

TEST_CASE("hyperbolic walk drifts log y at rate -1/2") {
  Manifold H = Manifold::hyperbolic2();
  Vec x0 = v2(0, 1);
  const int n_paths = 4000;
  const double t = 0.5, dt = 0.001;
  double sum = 0, sum2 = 0;
  for (int i = 0; i < n_paths; ++i) {
    RngStream rng = RngStream::for_lane(37, "h2-logy-unit", i);
    FramedPath p = sample_bm(H, x0, H.canonical_frame(x0), t, dt, rng);
    double ly = std::log(p.points.back()[1]);
    sum += ly;
    sum2 += ly * ly;
  }
  double mean = sum / n_paths;
  double var = sum2 / n_paths - mean * mean;
  double se = std::sqrt(var / n_paths);
  // log y of half-plane Brownian motion is a standard BM with drift -t/2
  // (half the metric Laplacian of log y is -1/2). 0.005 absorbs weak error.
  CHECK(std::abs(mean + 0.5 * t) < 3.0 * se + 0.005);
  CHECK(var == doctest::Approx(t).epsilon(0.15));
}

TEST_CASE("damping matrices reduce to the curvature scalar factors") {
  RngStream rng(303);
  const double dt = 0.01, T = 1.0;

  Manifold E = Manifold::euclidean(2);
  FramedPath pe = sample_bm(E, Vec::Zero(2), Mat::Identity(2, 2), T, dt, rng);
  std::vector<Mat> me = damping_matrices(pe);
  REQUIRE(int(me.size()) == pe.steps() + 1);
  for (std::size_t k = 0; k < me.size(); k += 20)
    CHECK((me[k] - Mat::Identity(2, 2)).norm() < 1e-13);

  Manifold S = Manifold::sphere2();
  Vec pole = v3(0, 0, 1);
  FramedPath ps = sample_bm(S, pole, S.canonical_frame(pole), T, dt, rng);
  std::vector<Mat> ms = damping_matrices(ps);
  for (std::size_t k = 0; k < ms.size(); k += 20) {
    double factor = std::exp(-0.5 * ps.time(int(k)));
    CHECK((ms[k] - factor * Mat::Identity(2, 2)).norm() < 1e-12);
  }

  Manifold H = Manifold::hyperbolic2();
  FramedPath ph = sample_bm(H, v2(0, 1), H.canonical_frame(v2(0, 1)), T, dt, rng);
  std::vector<Mat> mh = damping_matrices(ph);
  for (std::size_t k = 0; k < mh.size(); k += 20) {
    double factor = std::exp(0.5 * ph.time(int(k)));
    CHECK((mh[k] - factor * Mat::Identity(2, 2)).norm() < 1e-12 * factor);
  }
}

TEST_CASE("sym_expm matches a hand diagonalization") {
  Mat S(2, 2);
  S << 1.0, 2.0, 2.0, 1.0;  // eigenvalues 3 and -1, eigenvectors (1,1)/sqrt2, (1,-1)/sqrt2
  Mat E = sym_expm(S);
  double a = 0.5 * (std::exp(3.0) + std::exp(-1.0));
  double b = 0.5 * (std::exp(3.0) - std::exp(-1.0));
  CHECK(E(0, 0) == doctest::Approx(a).epsilon(1e-12));
  CHECK(E(1, 1) == doctest::Approx(a).epsilon(1e-12));
  CHECK(E(0, 1) == doctest::Approx(b).epsilon(1e-12));
  CHECK(E(1, 0) == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("hitting_time finds the first grid time with rho_hat >= m") {
  Manifold E = Manifold::euclidean(1);
  FramedPath p;
  p.manifold = E;
  p.dt = 1.0;
  for (int k = 0; k <= 4; ++k) {
    Vec x(1);
    x << 0.5 * k;  // distance/2 = 0.25 k
    p.points.push_back(x);
    p.frames.push_back(Mat::Identity(1, 1));
    if (k > 0) p.increments.push_back(Vec::Zero(1));
  }
  Vec o = Vec::Zero(1);
  CHECK(hitting_time(p, o, 0.5) == 2.0);
  CHECK(hitting_time(p, o, 0.25) == 1.0);
  CHECK(std::isinf(hitting_time(p, o, 5.0)));
}

TEST_CASE("two-sided paths share the starting point and frame") {
  Manifold S = Manifold::sphere2();
  Vec pole = v3(0, 0, 1);
  RngStream rng(404);
  TwoSidedPath p = sample_two_sided(S, pole, S.canonical_frame(pole), 1.0, 0.5, 0.01, rng);
  CHECK((p.fwd.points[0] - p.bwd.points[0]).norm() == 0.0);
  CHECK((p.fwd.frames[0] - p.bwd.frames[0]).norm() == 0.0);
  CHECK(p.fwd.horizon() == doctest::Approx(1.0));
  CHECK(p.bwd.horizon() == doctest::Approx(0.5));
  CHECK((p.point_at(0.25) - p.fwd.points[p.fwd.node_at(0.25)]).norm() == 0.0);
  CHECK((p.point_at(-0.25) - p.bwd.points[p.bwd.node_at(0.25)]).norm() == 0.0);
}

TEST_CASE("sample_bm replays walk_bm draw for draw") {
  Manifold S = Manifold::sphere2();
  Vec pole = v3(0, 0, 1);
  RngStream r1(505), r2(505);
  FramedPath p = sample_bm(S, pole, S.canonical_frame(pole), 0.2, 0.01, r1);
  int count = 0;
  walk_bm(S, pole, S.canonical_frame(pole), 0.2, 0.01, r2,
          [&](int k, const Vec& x, const Mat& U, const Vec& db) {
            CHECK((x - p.points[k]).norm() == 0.0);
            CHECK((U - p.frames[k]).norm() == 0.0);
            if (k > 0) CHECK((db - p.increments[k - 1]).norm() == 0.0);
            ++count;
          });
  CHECK(count == p.steps() + 1);
}
