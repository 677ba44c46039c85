#include "pathspace/geometry.hpp"

#include <cmath>

namespace pathspace {

namespace {

constexpr double kTiny = 1e-15;

inline double clamp1(double x) { return x < -1.0 ? -1.0 : (x > 1.0 ? 1.0 : x); }

// Stable acosh(1 + w) for w >= 0.
inline double acosh1p(double w) {
  if (w <= 0.0) return 0.0;
  return std::log1p(w + std::sqrt(w * (w + 2.0)));
}

}  // namespace

Manifold Manifold::by_name(const std::string& name) {
  if (name == "sphere2") return sphere2();
  if (name == "hyperbolic2") return hyperbolic2();
  const std::string pre = "euclidean";
  if (name.rfind(pre, 0) == 0) {
    int n = 1;
    if (name.size() > pre.size()) n = std::stoi(name.substr(pre.size()));
    return euclidean(n);
  }
  throw GeometryError("unknown manifold: " + name);
}

std::string Manifold::name() const {
  switch (kind_) {
    case ManifoldKind::Euclidean: return "euclidean" + std::to_string(dim_);
    case ManifoldKind::Sphere2: return "sphere2";
    case ManifoldKind::Hyperbolic2: return "hyperbolic2";
  }
  return "?";
}

bool Manifold::check_point(const Vec& p, double tol) const {
  if (p.size() != rep_dim()) return false;
  if (!p.allFinite()) return false;
  switch (kind_) {
    case ManifoldKind::Euclidean: return true;
    case ManifoldKind::Sphere2: return std::abs(p.norm() - 1.0) <= tol;
    case ManifoldKind::Hyperbolic2: return p[1] > 0.0;
  }
  return false;
}

double Manifold::metric(const Vec& p, const Vec& v, const Vec& w) const {
  switch (kind_) {
    case ManifoldKind::Euclidean:
    case ManifoldKind::Sphere2:
      return v.dot(w);
    case ManifoldKind::Hyperbolic2:
      return v.dot(w) / (p[1] * p[1]);
  }
  return 0.0;
}

Mat Manifold::metric_matrix(const Vec& p) const {
  switch (kind_) {
    case ManifoldKind::Euclidean:
      return Mat::Identity(dim_, dim_);
    case ManifoldKind::Hyperbolic2:
      return Mat::Identity(2, 2) / (p[1] * p[1]);
    case ManifoldKind::Sphere2:
      throw GeometryError("sphere2 has no global chart metric here; see SphereChart");
  }
  return Mat();
}

std::vector<Mat> Manifold::christoffel(const Vec& p) const {
  switch (kind_) {
    case ManifoldKind::Euclidean:
      return std::vector<Mat>(dim_, Mat::Zero(dim_, dim_));
    case ManifoldKind::Hyperbolic2: {
      double iy = 1.0 / p[1];
      std::vector<Mat> gamma(2, Mat::Zero(2, 2));
      gamma[0](0, 1) = -iy;  // Gamma^x_{xy}
      gamma[0](1, 0) = -iy;
      gamma[1](0, 0) = iy;   // Gamma^y_{xx}
      gamma[1](1, 1) = -iy;  // Gamma^y_{yy}
      return gamma;
    }
    case ManifoldKind::Sphere2:
      throw GeometryError("sphere2 is handled in the embedding; SphereChart has the chart symbols");
  }
  return {};
}

Vec Manifold::tangent_project(const Vec& p, const Vec& v) const {
  if (kind_ == ManifoldKind::Sphere2) return v - v.dot(p) * p;
  return v;
}

Vec Manifold::rep_project(const Vec& p) const {
  if (kind_ == ManifoldKind::Sphere2) return p / p.norm();
  return p;
}

Vec Manifold::exp(const Vec& p, const Vec& v) const {
  switch (kind_) {
    case ManifoldKind::Euclidean:
      return p + v;
    case ManifoldKind::Sphere2: {
      double th = v.norm();
      if (th < kTiny) return p;
      Vec q = std::cos(th) * p + (std::sin(th) / th) * v;
      return q / q.norm();
    }
    case ManifoldKind::Hyperbolic2: {
      double x = p[0], y = p[1];
      double a = v[0], b = v[1];
      double vn = std::hypot(a, b);
      double t = vn / y;  // geodesic length
      if (t < kTiny) return p;
      Vec q(2);
      if (std::abs(a) <= 1e-13 * vn) {
        // Vertical geodesic.
        q << x, y * std::exp(b > 0 ? t : -t);
        return q;
      }
      // Geodesic = half circle centered at (c, 0) with radius r, parametrized
      // by arc length u: (c + r tanh u, r sech u).
      double sigma = a > 0 ? 1.0 : -1.0;
      double u0 = std::asinh(-b / a);  // sinh u0 = -b/a at the start point
      double r = y * vn / std::abs(a);
      double c = x - r * std::tanh(u0);
      double u1 = u0 + sigma * t;
      q << c + r * std::tanh(u1), r / std::cosh(u1);
      return q;
    }
  }
  return p;
}

Vec Manifold::log(const Vec& p, const Vec& q) const {
  switch (kind_) {
    case ManifoldKind::Euclidean:
      return q - p;
    case ManifoldKind::Sphere2: {
      double c = clamp1(p.dot(q));
      Vec w = q - c * p;
      double s = w.norm();
      if (s < 1e-14) {
        if (c > 0.0) return Vec::Zero(3);
        throw GeometryError("sphere2 log at the antipode (cut locus)");
      }
      return (std::atan2(s, c) / s) * w;
    }
    case ManifoldKind::Hyperbolic2: {
      double x1 = p[0], y1 = p[1], x2 = q[0], y2 = q[1];
      Vec v(2);
      if (std::abs(x1 - x2) <= 1e-14 * (std::abs(x1) + std::abs(x2) + 1.0)) {
        v << 0.0, y1 * std::log(y2 / y1);
        return v;
      }
      double c = (x2 * x2 + y2 * y2 - x1 * x1 - y1 * y1) / (2.0 * (x2 - x1));
      double r = std::hypot(x1 - c, y1);
      double u1 = std::asinh((x1 - c) / y1);
      double u2 = std::asinh((x2 - c) / y2);
      double du = u2 - u1;
      // Unit chart tangent at p in the +u direction: (sech u1, -tanh u1).
      v << du * y1 * (y1 / r), -du * y1 * ((x1 - c) / r);
      return v;
    }
  }
  return q - p;
}

Vec Manifold::transport(const Vec& p, const Vec& q, const Vec& v) const {
  switch (kind_) {
    case ManifoldKind::Euclidean:
      return v;
    case ManifoldKind::Sphere2: {
      Vec l = log(p, q);
      double th = l.norm();
      if (th < 1e-14) return tangent_project(q, v);
      Vec e = l / th;
      double comp = v.dot(e);
      Vec qdir = -std::sin(th) * p + std::cos(th) * e;
      Vec w = v - comp * e + comp * qdir;
      return tangent_project(q, w);
    }
    case ManifoldKind::Hyperbolic2: {
      double x1 = p[0], y1 = p[1], x2 = q[0], y2 = q[1];
      double scale = y2 / y1;
      if (std::abs(x1 - x2) <= 1e-14 * (std::abs(x1) + std::abs(x2) + 1.0)) {
        return scale * v;  // vertical geodesic: conformal chart angle is constant
      }
      double c = (x2 * x2 + y2 * y2 - x1 * x1 - y1 * y1) / (2.0 * (x2 - x1));
      double r = std::hypot(x1 - c, y1);
      // Chart-unit geodesic tangents at the two ends (the conformal factor makes
      // chart angles equal g-angles, so transport = rotate by the tangent's turn
      // and rescale by y2/y1).
      double t1x = y1 / r, t1y = -(x1 - c) / r;
      double t2x = y2 / r, t2y = -(x2 - c) / r;
      double cosd = t1x * t2x + t1y * t2y;
      double sind = t1x * t2y - t1y * t2x;
      Vec w(2);
      w << scale * (cosd * v[0] - sind * v[1]), scale * (sind * v[0] + cosd * v[1]);
      return w;
    }
  }
  return v;
}

double Manifold::distance(const Vec& p, const Vec& q) const {
  switch (kind_) {
    case ManifoldKind::Euclidean:
      return (q - p).norm();
    case ManifoldKind::Sphere2: {
      Vec cr(3);
      cr << p[1] * q[2] - p[2] * q[1], p[2] * q[0] - p[0] * q[2], p[0] * q[1] - p[1] * q[0];
      return std::atan2(cr.norm(), p.dot(q));
    }
    case ManifoldKind::Hyperbolic2: {
      double dx = p[0] - q[0], dy = p[1] - q[1];
      return acosh1p((dx * dx + dy * dy) / (2.0 * p[1] * q[1]));
    }
  }
  return 0.0;
}

Mat Manifold::canonical_frame(const Vec& p) const {
  switch (kind_) {
    case ManifoldKind::Euclidean:
      return Mat::Identity(dim_, dim_);
    case ManifoldKind::Sphere2: {
      Vec axis = Vec::Zero(3);
      if (std::abs(p[2]) < 0.9) {
        axis[2] = 1.0;
      } else {
        axis[0] = 1.0;
      }
      Vec e1 = axis - axis.dot(p) * p;
      e1 /= e1.norm();
      Vec e2(3);
      e2 << p[1] * e1[2] - p[2] * e1[1], p[2] * e1[0] - p[0] * e1[2], p[0] * e1[1] - p[1] * e1[0];
      Mat f(3, 2);
      f.col(0) = e1;
      f.col(1) = e2;
      return f;
    }
    case ManifoldKind::Hyperbolic2: {
      Mat f = Mat::Zero(2, 2);
      f(0, 0) = p[1];
      f(1, 1) = p[1];
      return f;
    }
  }
  return Mat();
}

void Manifold::orthonormalize(const Vec& p, Mat& frame) const {
  for (int j = 0; j < frame.cols(); ++j) {
    Vec col = frame.col(j);
    if (kind_ == ManifoldKind::Sphere2) col = tangent_project(p, col);
    for (int i = 0; i < j; ++i) {
      col -= metric(p, frame.col(i), col) * frame.col(i);
    }
    double n = std::sqrt(metric(p, col, col));
    if (!(n > 0.0)) throw GeometryError("degenerate frame in orthonormalize");
    frame.col(j) = col / n;
  }
}

bool Manifold::frame_is_orthonormal(const Vec& p, const Mat& frame, double tol) const {
  if (frame.rows() != rep_dim() || frame.cols() != dim_) return false;
  for (int i = 0; i < dim_; ++i) {
    for (int j = i; j < dim_; ++j) {
      double want = i == j ? 1.0 : 0.0;
      if (std::abs(metric(p, frame.col(i), frame.col(j)) - want) > tol) return false;
    }
    if (kind_ == ManifoldKind::Sphere2 && std::abs(frame.col(i).dot(p)) > tol) return false;
  }
  return true;
}

}  // namespace pathspace
