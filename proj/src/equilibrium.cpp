#include "cva/equilibrium.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cva {

double sigma_eval(const NuSpec& nu, double mu) { return nu.sigma(mu); }

EquilibriumDist normalize(double d, const NuSpec& nu) {
  if (!(d > 0.0) || !std::isfinite(d)) throw std::invalid_argument("normalize: diffusion d must be > 0");
  nu.require_positive();
  EquilibriumDist dist;
  dist.d_ = d;
  dist.nu_ = nu;
  dist.sigma_ref_ = nu.sigma_unchecked(1.0);
  dist.rule_ = graded_rule(dist.layer_width());
  const double z = dist.rule_.integrate([&](double mu) { return dist.weight(mu); });
  // C = 1 / (2 pi int e^{sigma/d}), carried in log form.
  dist.log_c_ = -std::log(2.0 * std::numbers::pi * z) - dist.sigma_ref_ / d;
  dist.table_ = std::make_shared<const InverseCdfTable>(
      InverseCdfTable::from_density([&](double mu) { return dist.weight(mu); }, dist.layer_width()));
  return dist;
}

double bracket(const std::function<double(double)>& g, const EquilibriumDist& dist) {
  const QuadratureRule& rule = dist.rule();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double w = rule.weights[i] * dist.weight(rule.nodes[i]);
    num += w * g(rule.nodes[i]);
    den += w;
  }
  return num / den;
}

double c1(const EquilibriumDist& dist) {
  return bracket([](double mu) { return mu; }, dist);
}

double dissipation_H(std::span<const double> f, const EquilibriumDist& dist) {
  const std::size_t n = f.size();
  if (n < 64) throw std::invalid_argument("dissipation_H: need at least 64 theta points");
  for (double v : f)
    if (v < -1e-12 || !std::isfinite(v)) throw std::invalid_argument("dissipation_H: f must be non-negative");

  const double dtheta = std::numbers::pi / static_cast<double>(n - 1);
  std::vector<double> m(n), u(n);
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = dist.density(std::cos(i * dtheta));
    u[i] = f[i] / m[i];
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double du;
    if (i == 0)
      du = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * dtheta);
    else if (i == n - 1)
      du = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * dtheta);
    else
      du = (u[i + 1] - u[i - 1]) / (2.0 * dtheta);
    const double term = m[i] * du * du * std::sin(i * dtheta);
    acc += (i == 0 || i == n - 1 ? 0.5 : 1.0) * term;
  }
  return -dist.d() * 2.0 * std::numbers::pi * acc * dtheta;
}

}  // namespace cva
