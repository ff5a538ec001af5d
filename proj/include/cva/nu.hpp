#pragma once

#include <string>
#include <vector>

namespace cva {

/// Interaction frequency nu(mu), mu = cos(angle to the target direction).
/// Either a constant nu0 or a polynomial sum_k a_k mu^k. The antiderivative
/// sigma is anchored so that sigma(0) = 0, plus an optional constant offset
/// (which cancels in every normalized quantity).
class NuSpec {
 public:
  enum class Family { constant, polynomial };

  NuSpec() = default;  // constant 1

  static NuSpec constant(double nu0);
  /// Coefficients in increasing powers of mu.
  static NuSpec polynomial(std::vector<double> coefficients);
  /// "1", "const:0.5", "poly:1,0,0.5".
  static NuSpec parse(const std::string& text);

  Family family() const { return family_; }
  const std::vector<double>& coefficients() const { return coeffs_; }

  double operator()(double mu) const;
  /// sigma(mu) = int_0^mu nu + offset. Throws std::domain_error for |mu| > 1.
  double sigma(double mu) const;
  /// sigma without the domain check (used on quadrature nodes).
  double sigma_unchecked(double mu) const;

  NuSpec with_sigma_offset(double offset) const;
  double sigma_offset() const { return offset_; }

  /// min of nu on a 1001-point grid of [-1, 1].
  double grid_min() const;
  /// max of nu on the same grid.
  double grid_max() const;
  /// Throws std::invalid_argument unless nu > 0 on the grid.
  void require_positive() const;
  /// Throws std::invalid_argument unless nu >= 0 on the grid.
  void require_nonnegative() const;

  std::string to_string() const;

 private:
  Family family_ = Family::constant;
  std::vector<double> coeffs_{1.0};
  double offset_ = 0.0;
};

}  // namespace cva
