#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "pathspace/linalg.hpp"
#include "pathspace/rng.hpp"

namespace pathspace {

struct MonteCarloEstimate {
  double value = 0.0;
  double se = 0.0;
  std::size_t n = 0;
  double z_against(double target) const { return se > 0 ? (value - target) / se : 0.0; }
};

inline int thread_count_from_env() {
  if (const char* s = std::getenv("PATHSPACE_THREADS")) {
    int v = std::atoi(s);
    if (v >= 1) return v;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Runs `fn(lane, rng, row)` for lane = 0..n_traj-1, filling one record row per
// trajectory. Each lane's RNG stream is a pure function of (seed, experiment
// id, lane), and rows land at fixed indices, so the result matrix is identical
// for every thread count; reductions then happen in index order.
class Ensemble {
 public:
  using TrajectoryFn = std::function<void(std::size_t lane, RngStream& rng, Eigen::Ref<Eigen::RowVectorXd> row)>;

  static MatrixXd run(std::size_t n_traj, int record_len, std::uint64_t seed,
                      const std::string& experiment_id, const TrajectoryFn& fn,
                      int n_threads = 0) {
    if (n_threads <= 0) n_threads = thread_count_from_env();
    // Row-major so that records.row(lane) is contiguous and binds to the
    // Ref<RowVectorXd> parameter without a copy.
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> records(n_traj,
                                                                                   record_len);
    std::atomic<std::size_t> cursor{0};
    const std::size_t grain = 16;
    auto worker = [&]() {
      for (;;) {
        std::size_t begin = cursor.fetch_add(grain);
        if (begin >= n_traj) return;
        std::size_t end = std::min(begin + grain, n_traj);
        for (std::size_t lane = begin; lane < end; ++lane) {
          RngStream rng = RngStream::for_lane(seed, experiment_id, lane);
          fn(lane, rng, records.row(lane));
        }
      }
    };
    if (n_threads == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      pool.reserve(n_threads);
      for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }
    return records;
  }
};

inline MonteCarloEstimate mc_mean(const Eigen::Ref<const VectorXd>& xs) {
  MonteCarloEstimate e;
  e.n = static_cast<std::size_t>(xs.size());
  if (e.n == 0) return e;
  e.value = xs.mean();
  if (e.n > 1) {
    double ss = (xs.array() - e.value).square().sum();
    e.se = std::sqrt(ss / (double(e.n) * double(e.n - 1)));
  }
  return e;
}

// Covariance of two record columns with the standard error of the covariance
// estimator itself (from the empirical fourth moments).
inline MonteCarloEstimate mc_cov(const Eigen::Ref<const VectorXd>& xs,
                                 const Eigen::Ref<const VectorXd>& ys) {
  MonteCarloEstimate e;
  e.n = static_cast<std::size_t>(xs.size());
  if (e.n < 2) return e;
  double mx = xs.mean(), my = ys.mean();
  VectorXd prod = (xs.array() - mx) * (ys.array() - my);
  double c = prod.sum() / double(e.n - 1);
  e.value = c;
  double var_of_prod = (prod.array() - prod.mean()).square().sum() / double(e.n - 1);
  e.se = std::sqrt(var_of_prod / double(e.n));
  return e;
}

// Variance with delta-method standard error.
inline MonteCarloEstimate mc_var(const Eigen::Ref<const VectorXd>& xs) { return mc_cov(xs, xs); }

}  // namespace pathspace
