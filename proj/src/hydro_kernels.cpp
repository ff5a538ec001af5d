// Rusanov step for the z-propagation system. One per-cell update, two drivers.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "cva/hydro.hpp"

namespace cva {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct StepContext {
  const HydroState1D& in;
  double dt;
  double dz;
  std::size_t n;
  std::vector<double> speed;     // per-cell max |gamma|
  std::vector<double> mass_flux; // at interface i + 1/2
  std::vector<double> log_rho;

  std::size_t left(std::size_t i) const { return i == 0 ? n - 1 : i - 1; }
  std::size_t right(std::size_t i) const { return i + 1 == n ? 0 : i + 1; }

  void cell_speed(std::size_t i) {
    speed[i] = eigenvalues(in.theta[i], in.coeffs.c, in.coeffs.lambda).max_abs();
    log_rho[i] = std::log(in.rho[i]);
  }

  // Needs speed[] of both neighbours.
  void interface_flux(std::size_t i) {
    const std::size_t r = right(i);
    const double alpha = std::max(speed[i], speed[r]);
    const double rho_mid = 0.5 * (in.rho[i] + in.rho[r]);
    const double theta_mid = 0.5 * (in.theta[i] + in.theta[r]);
    mass_flux[i] = rho_mid * std::cos(theta_mid) - 0.5 * alpha * (in.rho[r] - in.rho[i]);
  }

  void update_cell(std::size_t i, HydroState1D& out) const {
    const std::size_t l = left(i), r = right(i);
    const double a_r = std::max(speed[i], speed[r]);
    const double a_l = std::max(speed[l], speed[i]);
    const double c = in.coeffs.c, lambda = in.coeffs.lambda;
    const double th = in.theta[i];
    const double cth = std::cos(th), sth = std::sin(th);

    out.rho[i] = in.rho[i] - dt / dz * (mass_flux[i] - mass_flux[l]);

    const double dth_c = (in.theta[r] - in.theta[l]) / (2.0 * dz);
    const double dlr_c = (log_rho[r] - log_rho[l]) / (2.0 * dz);
    const double visc_th = (a_r * (in.theta[r] - th) - a_l * (th - in.theta[l])) / (2.0 * dz);
    double theta_new = th - dt * (c * cth * dth_c - lambda * sth * dlr_c) + dt * visc_th;

    const double dphi_r = std::remainder(in.phi[r] - in.phi[i], kTwoPi);
    const double dphi_l = std::remainder(in.phi[i] - in.phi[l], kTwoPi);
    const double dph_c = (dphi_r + dphi_l) / (2.0 * dz);
    const double visc_ph = (a_r * dphi_r - a_l * dphi_l) / (2.0 * dz);
    double phi_new = in.phi[i] - dt * c * cth * dph_c + dt * visc_ph;

    // Reflect through the poles; the azimuth flips by pi.
    if (theta_new < 0.0) {
      theta_new = -theta_new;
      phi_new += std::numbers::pi;
    } else if (theta_new > std::numbers::pi) {
      theta_new = kTwoPi - theta_new;
      phi_new += std::numbers::pi;
    }
    phi_new = std::fmod(phi_new, kTwoPi);
    if (phi_new < 0.0) phi_new += kTwoPi;
    if (phi_new >= kTwoPi) phi_new = 0.0;
    out.theta[i] = theta_new;
    out.phi[i] = phi_new;
  }
};

void check_cfl(const HydroState1D& state, double dt) {
  if (!(dt > 0.0)) throw NumericalError("step_hydro: dt must be > 0");
  const double limit = 0.9 * state.dz() / max_wave_speed(state);
  if (dt > limit * (1.0 + 1e-12))
    throw NumericalError("step_hydro: CFL violated (dt = " + std::to_string(dt) + " > " + std::to_string(limit) + ")");
}

}  // namespace

HydroState1D step_hydro(const HydroState1D& state, double dt, Exec exec) {
  check_cfl(state, dt);
  const std::size_t n = state.size();
  StepContext ctx{state, dt, state.dz(), n, std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
  HydroState1D out = state;
  out.time = state.time + dt;

  if (exec == Exec::serial) {
    for (std::size_t i = 0; i < n; ++i) ctx.cell_speed(i);
    for (std::size_t i = 0; i < n; ++i) ctx.interface_flux(i);
    for (std::size_t i = 0; i < n; ++i) ctx.update_cell(i, out);
  } else {
    const auto sn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel num_threads(num_threads())
    {
#pragma omp for schedule(static)
      for (std::ptrdiff_t i = 0; i < sn; ++i) ctx.cell_speed(static_cast<std::size_t>(i));
#pragma omp for schedule(static)
      for (std::ptrdiff_t i = 0; i < sn; ++i) ctx.interface_flux(static_cast<std::size_t>(i));
#pragma omp for schedule(static)
      for (std::ptrdiff_t i = 0; i < sn; ++i) ctx.update_cell(static_cast<std::size_t>(i), out);
    }
  }

  for (std::size_t i = 0; i < n; ++i)
    if (!(out.rho[i] > 0.0)) throw NumericalError("step_hydro: density became non-positive in cell " + std::to_string(i));
  return out;
}

}  // namespace cva
