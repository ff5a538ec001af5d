#include "cva/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cva {

QuadratureRule gauss_rule(int n) {
  if (n < 2) throw std::invalid_argument("gauss_rule: n must be >= 2");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  rule.degree = 2 * n - 1;
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Re-evaluate the derivative at the converged node for the weight.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

QuadratureRule gauss_rule_on(int n, double a, double b) {
  QuadratureRule rule = gauss_rule(n);
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    rule.nodes[i] = mid + half * rule.nodes[i];
    rule.weights[i] *= half;
  }
  return rule;
}

std::vector<double> graded_breakpoints(double layer_width) {
  std::vector<double> bp;
  if (!(layer_width < 0.5)) {
    for (int k = 0; k <= 4; ++k) bp.push_back(-1.0 + 0.5 * k);
    return bp;
  }
  // Distances from mu = 1: 2, 1, 1/2, ... down to ~layer_width / 8.
  std::vector<double> dist;
  for (double t = 2.0; t > layer_width / 8.0; t *= 0.5) dist.push_back(t);
  for (double t : dist) bp.push_back(1.0 - t);
  bp.push_back(1.0);
  // Split the coarse panel [-1, 0] so it is not a single long panel.
  bp.insert(bp.begin() + 1, -0.5);
  return bp;
}

QuadratureRule graded_rule(double layer_width, int nodes_per_panel) {
  const std::vector<double> bp = graded_breakpoints(layer_width);
  QuadratureRule rule;
  rule.degree = 2 * nodes_per_panel - 1;
  for (std::size_t p = 0; p + 1 < bp.size(); ++p) {
    const QuadratureRule panel = gauss_rule_on(nodes_per_panel, bp[p], bp[p + 1]);
    rule.nodes.insert(rule.nodes.end(), panel.nodes.begin(), panel.nodes.end());
    rule.weights.insert(rule.weights.end(), panel.weights.begin(), panel.weights.end());
  }
  return rule;
}

}  // namespace cva
