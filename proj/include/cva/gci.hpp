#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "cva/nu.hpp"

namespace cva {

/// A solver could not produce a trustworthy answer (singular system, residual
/// above tolerance, degenerate denominator, CFL violation, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Profile g(mu) of the generalized collision invariant, psi_1 = -g sin(phi),
/// together with h = g / sqrt(1 - mu^2).
///
/// g solves, in Sturm-Liouville form (the profile equation divided by 1 - mu^2),
///   -(w (1-mu^2) g')' + w g / (1-mu^2) = -(1-mu^2)^{1/2} w,   w = e^{sigma/d},
/// with weak form: for all test functions v,
///   int w (1-mu^2) g' v' + int w g v / (1-mu^2) = -int (1-mu^2)^{1/2} w v.
/// The boundary terms w (1-mu^2) g' v vanish at mu = +-1 because the flux
/// weight does, so no boundary condition is imposed.
///
/// Discretization: g = sqrt(1-mu^2) h with h piecewise linear on the mesh
/// (vertices include +-1, where g = 0). With v = sqrt(1-mu^2) phi the pairing becomes
///   int w [ (s^2 h' - mu h)(s^2 phi' - mu phi) + h phi ] = -int w s^2 phi,  s^2 = 1-mu^2,
/// whose integrands are smooth, so the scheme is second order even though g
/// itself has a square-root profile at the poles.
struct GciSolution {
  std::vector<double> mu_nodes;
  std::vector<double> g_values;
  std::vector<double> h_values;
  double d = 1.0;
  NuSpec nu;
  int n_cells = 0;
  double residual_norm = 0.0;  // max |A h - F| / max |F| of the assembled system
  bool graded_mesh = false;

  /// P1 interpolation of h, and g = sqrt(1 - mu^2) h.
  double h_at(double mu) const;
  double g_at(double mu) const;
};

inline constexpr double kGciResidualTolerance = 1e-8;

/// Throws std::invalid_argument for d <= 0, n_cells < 32 or nu not positive;
/// NumericalError when the system is singular or the residual exceeds 1e-8.
/// The mesh is uniform unless the forward layer (width d/nu(1)) is thinner than
/// 16 cells, in which case it is graded towards mu = 1.
GciSolution solve_g(double d, const NuSpec& nu, int n_cells);

/// Recompute h = g / sqrt(1 - mu^2) at interior nodes (end values are kept).
GciSolution h_from_g(GciSolution sol);

/// Strong-form residual of the profile equation (normalized by w), by
/// three-point differences on the nodal g, maximized over nodes |mu| <= mu_cut.
double strong_residual(const GciSolution& sol, double mu_cut = 0.9);

struct HydroCoefficients {
  double d = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double lambda = 0.0;
  double c = 0.0;                // c2 / c1
  double lambda_rescaled = 0.0;  // lambda / c1
  double residual_norm = 0.0;
  int n_cells = 0;

  /// c1 in (0, 1) and lambda > 0; throws NumericalError otherwise.
  void validate() const;
};

/// c2 = <cos>_{(sin^2) nu h M},  lambda = d <1/nu>_{(sin^2) nu h M}, c1 = <cos>_M.
HydroCoefficients coefficients(const GciSolution& sol);
HydroCoefficients coefficients(double d, const NuSpec& nu, int n_cells);

}  // namespace cva
