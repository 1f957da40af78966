#pragma once

#include <functional>
#include <vector>

namespace pflab {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }

  /// Fixed-order summation (node order), so results are reproducible bitwise.
  template <typename F>
  double integrate(F&& f) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(nodes[i]);
    return sum;
  }
};

/// n-point Gauss-Legendre rule mapped to [a, b].
QuadratureRule gauss_legendre(int n, double a, double b);

/// `panels` equal panels on [a, b], each with an `order`-point Gauss-Legendre
/// rule.
QuadratureRule composite_gauss_legendre(int panels, int order, double a, double b);

/// Grid for momentum integrals of rotation-invariant-in-|k| integrands that
/// may depend on the angle to a single direction: radial nodes in |k| and
/// Gauss-Legendre nodes in mu = cos(angle) on [-1, 1].
struct MomentumGrid {
  QuadratureRule radial;
  QuadratureRule angular;

  /// int d^3k f(|k|) = 4 pi int k^2 f(k) dk.
  template <typename F>
  double integrate_radial(F&& f) const {
    constexpr double four_pi = 12.566370614359172953850573533118;
    return four_pi * radial.integrate([&](double k) { return k * k * f(k); });
  }

  /// int d^3k f(|k|, mu) = 2 pi int k^2 dk int dmu f(k, mu).
  template <typename F>
  double integrate(F&& f) const {
    constexpr double two_pi = 6.283185307179586476925286766559;
    double sum = 0.0;
    for (std::size_t i = 0; i < radial.size(); ++i) {
      const double k = radial.nodes[i];
      double inner = 0.0;
      for (std::size_t j = 0; j < angular.size(); ++j) inner += angular.weights[j] * f(k, angular.nodes[j]);
      sum += radial.weights[i] * k * k * inner;
    }
    return two_pi * sum;
  }
};

}  // namespace pflab
