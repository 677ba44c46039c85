#include "pathspace/path.hpp"

#include <cmath>

namespace pathspace {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

Vec sample_nu(const NuSpec& nu, const Manifold& M, RngStream& rng) {
  switch (nu.kind) {
    case NuSpec::Kind::PointMass:
      return nu.point;
    case NuSpec::Kind::UniformSphere: {
      if (M.kind() != ManifoldKind::Sphere2)
        throw GeometryError("uniform-sphere start needs sphere2");
      double z = 2.0 * rng.uniform() - 1.0;
      double phi = 2.0 * kPi * rng.uniform();
      double s = std::sqrt(std::max(0.0, 1.0 - z * z));
      Vec p(3);
      p << s * std::cos(phi), s * std::sin(phi), z;
      return p;
    }
    case NuSpec::Kind::TruncatedLebesgue: {
      if (M.kind() == ManifoldKind::Euclidean) {
        // Uniform in the ball of radius R: direction uniform, radius R*u^{1/n}.
        int n = M.dim();
        Vec dir = rng.normal_vec(n);
        double dn = dir.norm();
        if (dn < 1e-300) dir.setZero(), dir[0] = 1.0, dn = 1.0;
        double r = nu.radius * std::pow(rng.uniform(), 1.0 / n);
        return nu.point + (r / dn) * dir;
      }
      if (M.kind() == ManifoldKind::Hyperbolic2) {
        // Uniform w.r.t. hyperbolic area on the geodesic ball: the radial law
        // has density sinh(r) dr, inverted in closed form.
        double u = rng.uniform();
        double r = std::acosh(1.0 + u * (std::cosh(nu.radius) - 1.0));
        double th = 2.0 * kPi * rng.uniform();
        Mat F = M.canonical_frame(nu.point);
        Vec v = r * (std::cos(th) * F.col(0) + std::sin(th) * F.col(1));
        return M.exp(nu.point, v);
      }
      throw GeometryError("truncated Lebesgue start unsupported for this manifold");
    }
  }
  throw GeometryError("bad NuSpec");
}

double nu_density(const NuSpec& nu, const Manifold& M, const Vec& y) {
  switch (nu.kind) {
    case NuSpec::Kind::PointMass:
      return (y - nu.point).norm() <= 1e-12 ? 1.0 : 0.0;
    case NuSpec::Kind::UniformSphere:
      return 1.0 / (4.0 * kPi);
    case NuSpec::Kind::TruncatedLebesgue:
      return M.distance(nu.point, y) <= nu.radius ? 1.0 : 0.0;
  }
  return 0.0;
}

double nu_total_mass(const NuSpec& nu, const Manifold& M) {
  switch (nu.kind) {
    case NuSpec::Kind::PointMass:
    case NuSpec::Kind::UniformSphere:
      return 1.0;
    case NuSpec::Kind::TruncatedLebesgue: {
      if (M.kind() == ManifoldKind::Euclidean) {
        int n = M.dim();
        // Volume of the n-ball, n <= kMaxDim.
        double vol = std::pow(kPi, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
        return vol * std::pow(nu.radius, n);
      }
      if (M.kind() == ManifoldKind::Hyperbolic2) return 2.0 * kPi * (std::cosh(nu.radius) - 1.0);
      throw GeometryError("truncated Lebesgue mass unsupported for this manifold");
    }
  }
  return 0.0;
}

Mat sym_expm(const Mat& S) {
  Eigen::SelfAdjointEigenSolver<Mat> es(S);
  Vec lam = es.eigenvalues();
  Mat V = es.eigenvectors();
  Vec e(lam.size());
  for (int i = 0; i < lam.size(); ++i) e[i] = std::exp(lam[i]);
  return V * e.asDiagonal() * V.transpose();
}

std::vector<Mat> damping_matrices(const FramedPath& path) {
  const Manifold& M = path.manifold;
  int n = M.dim();
  std::vector<Mat> out;
  out.reserve(path.points.size());
  Mat Mk = Mat::Identity(n, n);
  out.push_back(Mk);
  for (int k = 0; k < path.steps(); ++k) {
    Mat ric = M.ricci_in_frame(path.points[k], path.frames[k]);
    bool scalar = true;
    double k0 = ric(0, 0);
    for (int i = 0; i < n && scalar; ++i)
      for (int j = 0; j < n && scalar; ++j)
        if (std::abs(ric(i, j) - (i == j ? k0 : 0.0)) > 0.0) scalar = false;
    if (scalar) {
      Mk *= std::exp(-0.5 * path.dt * k0);
    } else {
      Mk = Mk * sym_expm(Mat(-0.5 * path.dt * ric));
    }
    out.push_back(Mk);
  }
  return out;
}

double hitting_time(const FramedPath& path, const Vec& o, double m) {
  const Manifold& M = path.manifold;
  for (std::size_t k = 0; k < path.points.size(); ++k) {
    if (0.5 * M.distance(o, path.points[k]) >= m) return double(k) * path.dt;
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace pathspace
