#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "pathspace/linalg.hpp"

namespace pathspace {

struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ManifoldKind { Euclidean, Sphere2, Hyperbolic2 };

// Point / tangent representation conventions:
//   Euclidean(n): chart = R^n, tangents = R^n.
//   Sphere2:      unit sphere embedded in R^3; tangents are embedded vectors
//                 orthogonal to the point. Intrinsic dimension 2, rep dim 3.
//   Hyperbolic2:  upper half plane chart (x, y), y > 0, metric (dx^2+dy^2)/y^2.
// Frames are rep_dim x dim matrices whose columns are g-orthonormal tangents.
class Manifold {
 public:
  static Manifold euclidean(int n) {
    if (n < 1 || n > kMaxDim) throw GeometryError("euclidean dimension out of range");
    return Manifold(ManifoldKind::Euclidean, n);
  }
  static Manifold sphere2() { return Manifold(ManifoldKind::Sphere2, 2); }
  static Manifold hyperbolic2() { return Manifold(ManifoldKind::Hyperbolic2, 2); }

  static Manifold by_name(const std::string& name);

  ManifoldKind kind() const { return kind_; }
  int dim() const { return dim_; }
  int rep_dim() const { return kind_ == ManifoldKind::Sphere2 ? 3 : dim_; }
  std::string name() const;

  // Constant K with Ric >= K * g (equality for all three kinds here).
  double ricci_lower_bound() const {
    switch (kind_) {
      case ManifoldKind::Euclidean: return 0.0;
      case ManifoldKind::Sphere2: return 1.0;
      case ManifoldKind::Hyperbolic2: return -1.0;
    }
    return 0.0;
  }

  bool check_point(const Vec& p, double tol = 1e-9) const;
  void require_point(const Vec& p) const {
    if (!check_point(p)) throw GeometryError(name() + ": point fails manifold constraint");
  }

  double metric(const Vec& p, const Vec& v, const Vec& w) const;
  double norm(const Vec& p, const Vec& v) const { return std::sqrt(metric(p, v, v)); }

  // Chart metric matrix; defined for the chart manifolds (Euclidean, Hyperbolic2).
  Mat metric_matrix(const Vec& p) const;

  // Christoffel symbols in the chart: result[k](i,j) = Gamma^k_{ij}.
  // Sphere2 is handled in the embedding and has no global chart here; use
  // SphereChart below for chart-level checks.
  std::vector<Mat> christoffel(const Vec& p) const;

  Vec exp(const Vec& p, const Vec& v) const;
  Vec log(const Vec& p, const Vec& q) const;  // throws near the cut locus (Sphere2 antipode)
  Vec transport(const Vec& p, const Vec& q, const Vec& v) const;  // along the unique geodesic
  double distance(const Vec& p, const Vec& q) const;
  double distance_clamped(const Vec& p, const Vec& q) const {
    double d = distance(p, q);
    return d < 1.0 ? d : 1.0;
  }

  // Project an ambient/chart vector onto the tangent space at p (no-op for chart kinds).
  Vec tangent_project(const Vec& p, const Vec& v) const;
  // Pull a drifted representation point back onto the manifold.
  Vec rep_project(const Vec& p) const;

  // Ricci operator in an orthonormal frame: dim x dim symmetric matrix.
  // Constant-curvature kinds give K * I independent of p and frame.
  Mat ricci_in_frame(const Vec& p, const Mat& frame) const {
    (void)p;
    (void)frame;
    return ricci_lower_bound() * Mat::Identity(dim_, dim_);
  }

  Mat canonical_frame(const Vec& p) const;
  // Modified Gram-Schmidt in g_p; columns must start linearly independent.
  void orthonormalize(const Vec& p, Mat& frame) const;
  bool frame_is_orthonormal(const Vec& p, const Mat& frame, double tol = 1e-8) const;

  // Coordinates of tangent w in the orthonormal frame: a_i = g(e_i, w).
  Vec frame_coords(const Vec& p, const Mat& frame, const Vec& w) const {
    Vec a(dim_);
    for (int i = 0; i < dim_; ++i) a[i] = metric(p, frame.col(i), w);
    return a;
  }

 private:
  Manifold(ManifoldKind k, int d) : kind_(k), dim_(d) {}
  ManifoldKind kind_;
  int dim_;
};

// Polar chart (theta, phi) on the sphere minus poles; test support for the
// chart-level Christoffel/metric consistency checks.
struct SphereChart {
  static Mat metric_matrix(const Vec& tp) {
    double st = std::sin(tp[0]);
    Mat g = Mat::Zero(2, 2);
    g(0, 0) = 1.0;
    g(1, 1) = st * st;
    return g;
  }
  static std::vector<Mat> christoffel(const Vec& tp) {
    double theta = tp[0];
    double st = std::sin(theta), ct = std::cos(theta);
    std::vector<Mat> gamma(2, Mat::Zero(2, 2));
    gamma[0](1, 1) = -st * ct;          // Gamma^theta_{phi phi}
    gamma[1](0, 1) = ct / st;           // Gamma^phi_{theta phi}
    gamma[1](1, 0) = ct / st;
    return gamma;
  }
  static Vec embed(const Vec& tp) {
    Vec p(3);
    p << std::sin(tp[0]) * std::cos(tp[1]), std::sin(tp[0]) * std::sin(tp[1]), std::cos(tp[0]);
    return p;
  }
};

}  // namespace pathspace
