#include <doctest.h>

#include <cmath>
#include <vector>

#include "pathspace/montecarlo.hpp"
#include "pathspace/rng.hpp"

using namespace pathspace;

TEST_CASE("rng streams are deterministic and lane-separated") {
  RngStream a = RngStream::for_lane(42, "exp", 3);
  RngStream b = RngStream::for_lane(42, "exp", 3);
  RngStream c = RngStream::for_lane(42, "exp", 4);
  RngStream d = RngStream::for_lane(42, "other", 3);
  bool all_equal = true, lane_differs = false, tag_differs = false;
  for (int i = 0; i < 64; ++i) {
    std::uint64_t va = a.next_u64();
    all_equal = all_equal && (va == b.next_u64());
    lane_differs = lane_differs || (va != c.next_u64());
    tag_differs = tag_differs || (va != d.next_u64());
  }
  CHECK(all_equal);
  CHECK(lane_differs);
  CHECK(tag_differs);
}

TEST_CASE("uniform lies in (0,1] and normal has the right moments") {
  RngStream rng(7);
  const int n = 200000;
  double sum = 0, sum2 = 0, sum3 = 0, sum4 = 0, usum = 0;
  double umin = 1e9, umax = -1e9;
  for (int i = 0; i < n; ++i) {
    double u = rng.uniform();
    umin = std::min(umin, u);
    umax = std::max(umax, u);
    usum += u;
    double x = rng.normal();
    sum += x;
    sum2 += x * x;
    sum3 += x * x * x;
    sum4 += x * x * x * x;
  }
  CHECK(umin > 0.0);
  CHECK(umax <= 1.0);
  CHECK(usum / n == doctest::Approx(0.5).epsilon(0.01));
  double m = sum / n, m2 = sum2 / n, m3 = sum3 / n, m4 = sum4 / n;
  // 4-sigma bands: sd(mean)=1/sqrt(n), sd(m2)=sqrt(2/n), sd(m3)=sqrt(15/n), sd(m4)=sqrt(96/n).
  CHECK(std::abs(m) < 4.0 / std::sqrt(double(n)));
  CHECK(std::abs(m2 - 1.0) < 4.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(m3) < 4.0 * std::sqrt(15.0 / n));
  CHECK(std::abs(m4 - 3.0) < 4.0 * std::sqrt(96.0 / n));
}

TEST_CASE("normal_vec scales by the requested standard deviation") {
  RngStream a(99), b(99);
  Vec x = a.normal_vec(5, 2.0);
  Vec y = b.normal_vec(5, 1.0);
  CHECK((x - 2.0 * y).norm() == doctest::Approx(0.0));
}

TEST_CASE("mc_mean matches the textbook formulas") {
  VectorXd xs(4);
  xs << 1.0, 2.0, 3.0, 6.0;
  MonteCarloEstimate e = mc_mean(xs);
  CHECK(e.n == 4);
  CHECK(e.value == doctest::Approx(3.0));
  // Sample variance: ((-2)^2 + (-1)^2 + 0 + 3^2)/3 = 14/3; se = sqrt(14/3/4).
  CHECK(e.se == doctest::Approx(std::sqrt(14.0 / 3.0 / 4.0)).epsilon(1e-12));
  CHECK(e.z_against(3.0) == 0.0);
  CHECK(e.z_against(2.0) == doctest::Approx(1.0 / e.se));

  VectorXd one(1);
  one << 5.0;
  MonteCarloEstimate e1 = mc_mean(one);
  CHECK(e1.value == 5.0);
  CHECK(e1.se == 0.0);
  CHECK(e1.z_against(4.0) == 0.0);  // se 0 means "no z"; callers compare values directly
}

TEST_CASE("mc_cov and mc_var match direct computation") {
  VectorXd xs(5), ys(5);
  xs << 1, 2, 3, 4, 10;
  ys << 2, 1, 5, 3, 8;
  double mx = xs.mean(), my = ys.mean();
  double cov = ((xs.array() - mx) * (ys.array() - my)).sum() / 4.0;
  MonteCarloEstimate e = mc_cov(xs, ys);
  CHECK(e.value == doctest::Approx(cov).epsilon(1e-14));
  MonteCarloEstimate v = mc_var(xs);
  CHECK(v.value == doctest::Approx((xs.array() - mx).square().sum() / 4.0).epsilon(1e-14));
  CHECK(v.se > 0.0);
}

TEST_CASE("ensemble results are independent of the thread count and grain boundaries") {
  auto fill = [](std::size_t lane, RngStream& rng, Eigen::Ref<Eigen::RowVectorXd> row) {
    row[0] = double(lane);
    row[1] = rng.normal();
    row[2] = rng.uniform();
  };
  // 37 trajectories: not a multiple of the scheduling grain.
  MatrixXd r1 = Ensemble::run(37, 3, 42, "unit", fill, 1);
  MatrixXd r3 = Ensemble::run(37, 3, 42, "unit", fill, 3);
  CHECK((r1 - r3).norm() == 0.0);
  for (int i = 0; i < 37; ++i) CHECK(r1(i, 0) == double(i));
  // Different seed changes the draws.
  MatrixXd r2 = Ensemble::run(37, 3, 43, "unit", fill, 2);
  CHECK((r1.col(1) - r2.col(1)).norm() > 0.0);
}

TEST_CASE("ensemble lanes reproduce the per-lane streams exactly") {
  MatrixXd r = Ensemble::run(
      5, 1, 7, "repro",
      [](std::size_t, RngStream& rng, Eigen::Ref<Eigen::RowVectorXd> row) { row[0] = rng.normal(); },
      2);
  for (int lane = 0; lane < 5; ++lane) {
    RngStream s = RngStream::for_lane(7, "repro", lane);
    CHECK(r(lane, 0) == s.normal());
  }
}
