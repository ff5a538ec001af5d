#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cva/exec.hpp"
#include "cva/hydro.hpp"
#include "cva/nu.hpp"
#include "cva/particles.hpp"

namespace cva::wb {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
/// Ordinary least squares y = slope x + intercept. Needs >= 2 distinct x.
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);
/// Spearman rank correlation (average ranks for ties).
double spearman(const std::vector<double>& x, const std::vector<double>& y);

// ---------------------------------------------------------------------------
// Homogeneous relaxation towards M_Omega (all-to-all coupling).

struct RelaxationParams {
  std::size_t n = 100000;
  double d = 1.0;
  NuSpec nu;
  double dt = 0.01;
  double t_end = 20.0;
  double burn_in = 10.0;        // histogram accumulated over [burn_in, t_end]
  double sample_every = 0.5;    // histogram / H / order sampling interval
  int hist_bins = 40;
  int legendre_degree = 8;      // density estimate used for H
  int h_grid = 128;             // theta grid for dissipation_H
};

struct RelaxationResult {
  std::vector<double> times;           // sample times (from t = 0)
  std::vector<double> order;           // order parameter at each time
  std::vector<double> dissipation;     // H estimate at each time
  std::vector<double> dissipation_ma;  // 5-window moving average of |H|
  double h_noise_floor = 0.0;          // |H| of i.i.d. equilibrium samples of the same size
  bool h_non_increasing = false;
  std::vector<double> bin_edges;       // in mu = cos(angle to the mean direction)
  std::vector<double> histogram;       // time-averaged empirical density of mu
  std::vector<double> expected;        // bin averages of the M_Omega density of mu
  double l1 = 0.0;
  double final_order = 0.0;
  bool converged = false;              // l1 < 0.05
};

RelaxationResult run_relaxation(const RelaxationParams& p, std::uint64_t seed, Exec exec = Exec::parallel);

struct AutocorrelationParams {
  std::size_t n = 100000;
  double d = 0.5;
  double dt = 1e-3;
  double t_end = 1.0;
  double sample_every = 0.1;
};

struct AutocorrelationResult {
  std::vector<double> times, mean, expected, sigma;
  double max_abs_z = 0.0;  // max |mean - expected| / sigma over the sample times
};

/// Pure sphere diffusion (nu = 0) with step_continuous: <omega(t).omega(0)> vs exp(-2 d t).
AutocorrelationResult run_autocorrelation(const AutocorrelationParams& p, std::uint64_t seed, Exec exec = Exec::parallel);

// ---------------------------------------------------------------------------
// Dense interacting runs: long-run order parameter against c1(d).

struct OrderSweepParams {
  std::size_t n = 100000;
  std::vector<double> d_list{0.2, 0.5, 1.0, 2.0};
  NuSpec nu;
  KernelSpec kernel;             // radius R
  double particles_per_ball = 200.0;
  double dt = 0.1;
  double burn_in = 3.0;
  double measure = 3.0;
  double sample_every = 0.5;
  std::string integrator = "split";  // split | continuous
};

/// Local alignment <omega_i . omega_bar_i>, where omega_bar_i is the kernel
/// mean direction of the other particles (self excluded).
double local_alignment(const ParticleState& state, const ModelParams& params, Exec exec = Exec::parallel);

struct OrderRow {
  double d = 0.0;
  double c1 = 0.0;
  double order_mean = 0.0;  // time average of local_alignment
  double order_sem = 0.0;   // naive standard error over samples
  double global_mean = 0.0; // time average of |mean omega|
  double rel_deviation = 0.0;
};

struct OrderSweepResult {
  std::vector<OrderRow> rows;
  double box = 0.0;
  double particles_per_ball = 0.0;
  double spearman = 0.0;
  double max_jump_ratio = 0.0;  // max / median of adjacent |order| differences
  std::vector<std::string> warnings;
};

OrderSweepResult run_order_vs_c1(const OrderSweepParams& p, std::uint64_t seed, Exec exec = Exec::parallel);

// ---------------------------------------------------------------------------
// Kernel expansion of the mean direction.

struct KernelExpansionParams {
  std::vector<double> eps_list{0.4, 0.2, 0.1, 0.05};
  std::string field = "smooth";  // smooth | constant
  KernelSpec::Shape shape = KernelSpec::Shape::ball;
  double field_scale = 1.0;      // length scale of the direction and density variations
  int n_radial = 24;
  int n_polar = 24;
  int n_azimuth = 48;
};

struct KernelExpansionResult {
  std::vector<double> eps, error;
  std::vector<double> ratios;  // error(eps_k) / error(eps_{k+1})
  LinearFit fit;               // log(error) vs log(eps)
  bool fit_ok = false;         // r2 >= 0.98
};

/// J(x) = int K(|x - y| / eps) rho(y) Omega(y) dy at x = 0 by product quadrature
/// over the support ball; error = |J / |J| - Omega(0)|.
KernelExpansionResult run_kernel_expansion(const KernelExpansionParams& p);

// ---------------------------------------------------------------------------
// Linear wave speeds of the hydrodynamic system.

struct WaveSpeedParams {
  double c = 1.0;
  double lambda = 1.0;
  double theta0 = 1.0;
  double rho0 = 1.0;
  double phi0 = 1.0;
  int n_z = 512;
  double cfl = 0.5;
  double amplitude = 1e-4;
};

struct WaveMode {
  std::string name;  // gamma_minus | gamma_0 | gamma_plus
  double expected = 0.0;
  double measured = 0.0;
  double error = 0.0;   // relative to |expected|, or to max |gamma| when expected is 0
  double growth = 0.0;  // final / initial mode amplitude
  bool measured_ok = false;
  bool contaminated = false;  // growth > 10
  std::string note;
};

struct WaveSpeedResult {
  std::vector<WaveMode> modes;
  double t_end = 0.0;
  int steps = 0;
};

/// Seeds one characteristic mode at a time (a single Fourier mode along the
/// right eigenvector), evolves with step_hydro, projects back onto the left
/// eigenvectors and reads the speed off the Fourier phase shift. Modes that
/// need a theta perturbation at a pole are reported as not measurable.
WaveSpeedResult measure_wave_speeds(const WaveSpeedParams& p, Exec exec = Exec::parallel);

}  // namespace cva::wb
