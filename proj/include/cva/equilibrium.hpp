#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "cva/inverse_cdf.hpp"
#include "cva/nu.hpp"
#include "cva/quadrature.hpp"
#include "cva/rng.hpp"
#include "cva/sphere.hpp"

namespace cva {

/// The von Mises-Fisher-like equilibrium M_Omega(omega) = C exp(sigma(omega.Omega)/d).
/// All mu-integrals are evaluated on a composite Gauss rule graded towards
/// mu = 1, with the exponent shifted by sigma(1) so nothing overflows for small d.
class EquilibriumDist {
 public:
  double d() const { return d_; }
  const NuSpec& nu() const { return nu_; }

  double log_normalization() const { return log_c_; }
  double normalization() const { return std::exp(log_c_); }

  /// M as a function of mu = cos(theta); integrates to 1 over S^2.
  double density(double mu) const { return std::exp(log_c_ + nu_.sigma_unchecked(mu) / d_); }
  /// exp((sigma(mu) - sigma(1)) / d), the numerically safe unnormalized weight.
  double weight(double mu) const { return std::exp((nu_.sigma_unchecked(mu) - sigma_ref_) / d_); }

  /// Width of the forward boundary layer, d / nu(1).
  double layer_width() const { return d_ / nu_(1.0); }
  const QuadratureRule& rule() const { return rule_; }
  const InverseCdfTable& cos_theta_table() const { return *table_; }

 private:
  friend EquilibriumDist normalize(double d, const NuSpec& nu);
  double d_ = 1.0;
  NuSpec nu_;
  double sigma_ref_ = 0.0;
  double log_c_ = 0.0;
  QuadratureRule rule_;
  std::shared_ptr<const InverseCdfTable> table_;
};

/// sigma(mu) with sigma(0) = 0, plus the optional offset.
double sigma_eval(const NuSpec& nu, double mu);

/// Throws std::invalid_argument for d <= 0 or nu not strictly positive.
EquilibriumDist normalize(double d, const NuSpec& nu);

/// <g>_M = int g e^{sigma/d} dmu / int e^{sigma/d} dmu.
double bracket(const std::function<double(double)>& g, const EquilibriumDist& dist);

/// <cos theta>_M, the equilibrium order parameter.
double c1(const EquilibriumDist& dist);

/// Draws from M_Omega: cos(theta) by inverse CDF, phi uniform.
template <class Rng>
std::vector<UnitVec> sample(const EquilibriumDist& dist, const UnitVec& axis, std::size_t n, Rng& rng) {
  const Frame frame = Frame::adapted(axis);
  std::vector<UnitVec> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double mu = dist.cos_theta_table().quantile(uniform01(rng));
    const double phi = 2.0 * std::numbers::pi * uniform01(rng);
    out.push_back(from_spherical({std::acos(std::clamp(mu, -1.0, 1.0)), phi}, frame));
  }
  return out;
}

/// H(f) = -d int M |grad(f/M)|^2 domega for an azimuthally symmetric f given
/// on a uniform grid theta_i = i pi / (n-1), n >= 64. Centred differences and
/// the trapezoid rule. Throws std::invalid_argument on f_i < -1e-12.
double dissipation_H(std::span<const double> f_of_theta, const EquilibriumDist& dist);

}  // namespace cva
