#include "cva/hydro.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <omp.h>

namespace cva {

namespace {
int g_threads = 0;
}

void set_num_threads(int n) {
  g_threads = n;
  if (n > 0) omp_set_num_threads(n);
}

int num_threads() { return g_threads > 0 ? g_threads : omp_get_max_threads(); }

RescaledCoefficients rescale(const HydroCoefficients& raw) {
  if (!(raw.c1 > 0.0)) throw std::invalid_argument("rescale: c1 must be > 0");
  return {raw.c2 / raw.c1, raw.lambda / raw.c1};
}

Mat3 flux_matrix(double rho, double theta, double c, double lambda) {
  if (!(rho > 0.0)) throw std::invalid_argument("flux_matrix: rho must be > 0");
  const double s = std::sin(theta), co = std::cos(theta);
  Mat3 a;
  a << co, -rho * s, 0.0,
       -lambda * s / rho, c * co, 0.0,
       0.0, 0.0, c * co;
  return a;
}

double EigenTriple::max_abs() const {
  return std::max({std::abs(gamma_minus), std::abs(gamma_0), std::abs(gamma_plus)});
}

EigenTriple eigenvalues(double theta, double c, double lambda) {
  if (lambda < 0.0) throw std::domain_error("eigenvalues: lambda < 0 gives a complex pair (system not hyperbolic)");
  const double s = std::sin(theta), co = std::cos(theta);
  const double disc = (c - 1.0) * (c - 1.0) * co * co + 4.0 * lambda * s * s;
  const double root = std::sqrt(disc);
  EigenTriple e;
  e.gamma_0 = c * co;
  e.gamma_minus = 0.5 * ((c + 1.0) * co - root);
  e.gamma_plus = 0.5 * ((c + 1.0) * co + root);
  return e;
}

Mat3 eigenvectors(double rho, double theta, double c, double lambda) {
  const EigenTriple g = eigenvalues(theta, c, lambda);
  const double s = std::sin(theta), co = std::cos(theta);
  auto block_vector = [&](double gamma) -> Vec3 {
    // From row 1 of (A - gamma I): (rho sin, cos - gamma); from row 2: (c cos - gamma, lambda sin / rho).
    const Vec3 a(rho * s, co - gamma, 0.0);
    const Vec3 b(c * co - gamma, lambda * s / rho, 0.0);
    const Vec3& best = a.norm() >= b.norm() ? a : b;
    if (best.norm() < 1e-14) return Vec3::Zero();
    return best.normalized();
  };
  Mat3 v;
  v.col(0) = block_vector(g.gamma_minus);
  v.col(1) = Vec3(0.0, 0.0, 1.0);
  v.col(2) = block_vector(g.gamma_plus);
  // Diagonal block (sin = 0 with c = 1): every vector is an eigenvector.
  if (v.col(0).isZero() && v.col(2).isZero() && std::abs(s) < 1e-14) {
    v.col(0) = Vec3(1.0, 0.0, 0.0);
    v.col(2) = Vec3(0.0, 1.0, 0.0);
  }
  return v;
}

HyperbolicityReport hyperbolicity_report(double c, double lambda, int n_theta) {
  if (n_theta < 3) throw std::invalid_argument("hyperbolicity_report: n_theta must be >= 3");
  HyperbolicityReport report;
  for (int k = 0; k < n_theta; ++k) {
    HyperbolicityEntry e;
    e.theta = std::numbers::pi * k / (n_theta - 1);
    const double s = std::sin(e.theta), co = std::cos(e.theta);
    e.real = (c - 1.0) * (c - 1.0) * co * co + 4.0 * lambda * s * s >= 0.0;
    if (!e.real) {
      e.hyperbolic = false;
      e.condition = std::numeric_limits<double>::infinity();
      report.entries.push_back(e);
      report.failing_thetas.push_back(e.theta);
      continue;
    }
    e.gamma = eigenvalues(e.theta, c, lambda);
    const double tol = 1e-12 * std::max(1.0, e.gamma.max_abs());
    e.degenerate = std::abs(e.gamma.gamma_plus - e.gamma.gamma_minus) < tol ||
                   std::abs(e.gamma.gamma_0 - e.gamma.gamma_minus) < tol ||
                   std::abs(e.gamma.gamma_0 - e.gamma.gamma_plus) < tol;
    const Mat3 v = eigenvectors(1.0, e.theta, c, lambda);
    const Eigen::JacobiSVD<Mat3> svd(v);
    const auto sv = svd.singularValues();
    e.condition = sv(2) > 0.0 ? sv(0) / sv(2) : std::numeric_limits<double>::infinity();
    e.hyperbolic = e.condition < 1e8;
    if (e.degenerate) report.degenerate_thetas.push_back(e.theta);
    if (!e.hyperbolic) report.failing_thetas.push_back(e.theta);
    report.entries.push_back(e);
  }
  return report;
}

double HydroState1D::mass() const {
  double m = 0.0;
  for (double r : rho) m += r;
  return m * dz();
}

void HydroState1D::validate() const {
  if (rho.empty()) throw std::invalid_argument("HydroState1D: empty grid");
  if (theta.size() != rho.size() || phi.size() != rho.size())
    throw std::invalid_argument("HydroState1D: rho, theta and phi must have the same length");
  if (!(length > 0.0)) throw std::invalid_argument("HydroState1D: length must be > 0");
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (!(rho[i] > 0.0)) throw std::invalid_argument("HydroState1D: rho must be > 0 in every cell");
    if (!(theta[i] >= 0.0 && theta[i] <= std::numbers::pi)) throw std::invalid_argument("HydroState1D: theta outside [0, pi]");
    if (!(phi[i] >= 0.0 && phi[i] < 2.0 * std::numbers::pi)) throw std::invalid_argument("HydroState1D: phi outside [0, 2pi)");
  }
  if (coeffs.lambda < 0.0) throw std::invalid_argument("HydroState1D: lambda must be >= 0");
}

double max_wave_speed(const HydroState1D& state) {
  double s = 0.0;
  for (double th : state.theta) s = std::max(s, eigenvalues(th, state.coeffs.c, state.coeffs.lambda).max_abs());
  return s;
}

double stable_dt(const HydroState1D& state, double cfl) {
  const double s = max_wave_speed(state);
  if (!(s > 0.0)) throw NumericalError("stable_dt: all wave speeds vanish");
  return cfl * state.dz() / s;
}

}  // namespace cva
