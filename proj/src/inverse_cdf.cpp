#include "cva/inverse_cdf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cva/quadrature.hpp"

namespace cva {

std::vector<double> InverseCdfTable::graded_nodes(double layer_width, int n_points) {
  if (n_points < 2) throw std::invalid_argument("InverseCdfTable: need at least 2 table points");
  std::vector<double> mu(n_points);
  const double last = n_points - 1.0;
  if (layer_width >= 10.0) {
    for (int k = 0; k < n_points; ++k) mu[k] = -1.0 + 2.0 * k / last;
  } else {
    // Distance from mu = 1 is l((1 + 2/l)^t - 1), t uniform in [0, 1].
    const double l = layer_width;
    const double growth = std::log1p(2.0 / l);
    for (int k = 0; k < n_points; ++k) {
      const double t = (last - k) / last;
      mu[k] = 1.0 - l * std::expm1(growth * t);
    }
  }
  mu.front() = -1.0;
  mu.back() = 1.0;
  return mu;
}

InverseCdfTable InverseCdfTable::from_density(const std::function<double(double)>& density, double layer_width,
                                              int n_points) {
  InverseCdfTable t;
  t.mu_ = graded_nodes(layer_width, n_points);
  t.cdf_.assign(n_points, 0.0);
  const QuadratureRule ref = gauss_rule(8);
  for (int k = 1; k < n_points; ++k) {
    const double a = t.mu_[k - 1], b = t.mu_[k];
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    double acc = 0.0;
    for (std::size_t q = 0; q < ref.size(); ++q) acc += ref.weights[q] * density(mid + half * ref.nodes[q]);
    t.cdf_[k] = t.cdf_[k - 1] + half * acc;
  }
  const double total = t.cdf_.back();
  if (!(total > 0.0) || !std::isfinite(total)) throw std::domain_error("InverseCdfTable: density has no finite positive mass");
  for (double& f : t.cdf_) f /= total;
  t.cdf_.back() = 1.0;
  return t;
}

InverseCdfTable InverseCdfTable::from_cdf(const std::function<double(double)>& cdf, double layer_width, int n_points) {
  InverseCdfTable t;
  t.mu_ = graded_nodes(layer_width, n_points);
  t.cdf_.resize(n_points);
  double running = 0.0;
  for (int k = 0; k < n_points; ++k) {
    running = std::max(running, std::clamp(cdf(t.mu_[k]), 0.0, 1.0));
    t.cdf_[k] = running;
  }
  t.cdf_.front() = 0.0;
  t.cdf_.back() = 1.0;
  return t;
}

double InverseCdfTable::quantile(double u) const {
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.begin()) return mu_.front();
  if (it == cdf_.end()) return mu_.back();
  const std::size_t k = static_cast<std::size_t>(it - cdf_.begin());
  const double f0 = cdf_[k - 1], f1 = cdf_[k];
  const double w = f1 > f0 ? (u - f0) / (f1 - f0) : 0.0;
  return mu_[k - 1] + w * (mu_[k] - mu_[k - 1]);
}

}  // namespace cva
