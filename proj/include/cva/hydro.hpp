#pragma once

#include <vector>

#include "cva/exec.hpp"
#include "cva/gci.hpp"
#include "cva/sphere.hpp"

namespace cva {

/// Coefficients after the time rescaling t = t'/c1: c = c2/c1, lambda' = lambda/c1.
struct RescaledCoefficients {
  double c = 1.0;
  double lambda = 1.0;
};

/// Throws std::invalid_argument for c1 <= 0.
RescaledCoefficients rescale(const HydroCoefficients& raw);

/// Flux matrix of the z-propagation system for (rho, theta, phi):
///   [[cos, -rho sin, 0], [-lambda sin / rho, c cos, 0], [0, 0, c cos]].
/// Throws std::invalid_argument for rho <= 0.
Mat3 flux_matrix(double rho, double theta, double c, double lambda);

struct EigenTriple {
  double gamma_minus = 0.0;
  double gamma_0 = 0.0;
  double gamma_plus = 0.0;

  double max_abs() const;
};

/// gamma_0 = c cos(theta),
/// gamma_+- = ((c+1) cos(theta) +- sqrt((c-1)^2 cos^2 + 4 lambda sin^2)) / 2.
/// Throws std::domain_error (complex pair, not hyperbolic) for lambda < 0.
EigenTriple eigenvalues(double theta, double c, double lambda);

/// Right eigenvectors of flux_matrix as columns ordered (gamma_-, gamma_0, gamma_+),
/// built from the rows of A - gamma I; unit length. A column is zero when the
/// construction finds no eigenvector (defective matrix).
Mat3 eigenvectors(double rho, double theta, double c, double lambda);

struct HyperbolicityEntry {
  double theta = 0.0;
  EigenTriple gamma;
  bool real = true;
  bool degenerate = false;  // two or more coincident eigenvalues
  double condition = 1.0;   // of the eigenvector matrix (inf when defective)
  bool hyperbolic = true;   // real and condition < 1e8
};

struct HyperbolicityReport {
  std::vector<HyperbolicityEntry> entries;
  std::vector<double> failing_thetas;
  std::vector<double> degenerate_thetas;
  bool all_hyperbolic() const { return failing_thetas.empty(); }
};

/// Sweep theta over n_theta equally spaced points of [0, pi] (n_theta >= 3).
HyperbolicityReport hyperbolicity_report(double c, double lambda, int n_theta);

/// Cell-averaged (rho, theta, phi) on a periodic z-grid of length `length`.
struct HydroState1D {
  double length = 1.0;
  std::vector<double> rho, theta, phi;
  double time = 0.0;
  RescaledCoefficients coeffs;

  std::size_t size() const { return rho.size(); }
  double dz() const { return length / static_cast<double>(rho.size()); }
  double mass() const;
  /// rho > 0, theta in [0, pi], phi in [0, 2pi), equal array sizes.
  void validate() const;
};

double max_wave_speed(const HydroState1D& state);
/// cfl * dz / max wave speed.
double stable_dt(const HydroState1D& state, double cfl = 0.9);

/// One forward-Euler step of the primitive-variable local Lax-Friedrichs
/// (Rusanov) scheme; rho in conservative flux form so mass telescopes.
/// Throws NumericalError on CFL violation (dt > 0.9 dz / max speed) or rho <= 0.
HydroState1D step_hydro(const HydroState1D& state, double dt, Exec exec = Exec::parallel);

}  // namespace cva
