#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pathspace/geometry.hpp"
#include "pathspace/rng.hpp"

namespace pathspace {

// One time window of a cylinder function: the integral of g(s, path(s)) over
// (0, T] (forward) or [-T, 0) (backward). grad_g returns the Riemannian
// gradient of x -> g(s, x) as a tangent vector in representation coordinates.
struct WindowSpec {
  double T = 1.0;
  bool backward = false;
  std::function<double(double, const Vec&)> g;
  std::function<Vec(double, const Vec&)> grad_g;
};

// F(path) = f(I_1, ..., I_m) with I_j the window integrals.
struct CylinderFunction {
  std::string id;
  Manifold manifold = Manifold::euclidean(1);
  std::function<double(const Vec&)> f;
  std::function<Vec(const Vec&)> grad_f;
  std::vector<WindowSpec> windows;

  int arity() const { return static_cast<int>(windows.size()); }
  bool two_sided() const {
    for (const auto& w : windows)
      if (w.backward) return true;
    return false;
  }
  double max_forward_T() const {
    double t = 0;
    for (const auto& w : windows)
      if (!w.backward && w.T > t) t = w.T;
    return t;
  }
  double max_backward_T() const {
    double t = 0;
    for (const auto& w : windows)
      if (w.backward && w.T > t) t = w.T;
    return t;
  }
};

// Probes every supplied gradient against central finite differences (grad_f on
// random argument vectors, each grad_g against exp-map probes of random
// tangent directions); throws GeometryError beyond tol. Called by the registry
// factory so a registered function can't carry a wrong gradient.
void validate_cylinder(const CylinderFunction& F, RngStream& rng, double tol = 1e-5);

// Built-in catalogue, addressable by id from the CLI and the test suites.
std::vector<std::string> cylinder_ids(const Manifold& M);
// The positive, bounded-away-from-zero subset used by the entropy-inequality suites.
std::vector<std::string> cylinder_suite_positive(const Manifold& M);
CylinderFunction make_cylinder(const Manifold& M, const std::string& id);

// Cameron-Martin direction h: R -> R^dim, h(0) = 0, compactly supported,
// piecewise C^1 with kinks on the default grids; hprime uses right-slopes at
// kinks so grid telescoping of h' reproduces the piecewise-linear ramps
// exactly (smooth fields telescope with first-order error in the step).
struct DirectionField {
  std::string id;
  int dim = 1;
  std::function<Vec(double)> h;
  std::function<Vec(double)> hprime;
  double support = 2.0;  // h vanishes outside [-support, support]
};

std::vector<std::string> direction_ids();
DirectionField make_direction(int dim, const std::string& id);

}  // namespace pathspace
