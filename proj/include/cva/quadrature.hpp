#pragma once

#include <cstddef>
#include <vector>

namespace cva {

/// Nodes and positive weights on [-1, 1].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int degree = 0;  // polynomials up to this degree are integrated exactly

  std::size_t size() const { return nodes.size(); }

  template <class F>
  double integrate(F&& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
    return acc;
  }
};

/// n-point Gauss-Legendre rule, exact to degree 2n-1. Throws for n < 2.
QuadratureRule gauss_rule(int n);

/// Gauss-Legendre nodes mapped onto [a, b] (weights scaled accordingly).
QuadratureRule gauss_rule_on(int n, double a, double b);

/// Composite Gauss rule on [-1, 1] whose panels shrink geometrically towards
/// mu = 1 down to about `layer_width`. Integrands of the form p(mu) e^{sigma(mu)/d}
/// concentrate in a layer of width ~ d / nu(1) at mu = 1; this keeps them
/// resolved for any d > 0. For layer_width >= 0.5 the panels are uniform.
QuadratureRule graded_rule(double layer_width, int nodes_per_panel = 24);

/// Breakpoints from -1 to 1 used by graded_rule (exposed for table building).
std::vector<double> graded_breakpoints(double layer_width);

}  // namespace cva
