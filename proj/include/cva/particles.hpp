#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cva/equilibrium.hpp"
#include "cva/exec.hpp"
#include "cva/inverse_cdf.hpp"
#include "cva/nu.hpp"
#include "cva/sphere.hpp"

namespace cva {

/// Isotropic observation kernel K(|x - y|) of radius R.
struct KernelSpec {
  enum class Shape { ball, bump };
  Shape shape = Shape::ball;
  double radius = 1.0;

  /// ball: 1 for r <= R; bump: exp(1 - 1 / (1 - (r/R)^2)) for r < R; else 0.
  double operator()(double r) const;
  static KernelSpec parse(const std::string& shape, double radius);
  std::string shape_name() const;
};

struct ModelParams {
  NuSpec nu;
  double d = 1.0;  // dimensionless diffusion D / nu0
  KernelSpec kernel;
  double epsilon = 1.0;

  /// nu >= 0 on [-1, 1] (nu == 0 is pure sphere diffusion), d >= 0, R > 0, epsilon > 0.
  void validate() const;
};

/// N particles in a periodic cube [0, box)^3 in dimensionless units (speed 1).
struct ParticleState {
  std::vector<Vec3> positions;
  std::vector<UnitVec> orientations;
  double time = 0.0;
  double box = 1.0;
  std::uint64_t seed = 0;
  std::uint64_t step = 0;  // number of steps taken; part of every RNG counter

  std::size_t size() const { return positions.size(); }
  /// Unit orientations (1e-12), positions inside [0, box), sizes match.
  void validate() const;
};

struct InitialOrientation {
  enum class Kind { isotropic, aligned, equilibrium };
  Kind kind = Kind::isotropic;
  UnitVec axis;
  double d = 1.0;  // for equilibrium
  NuSpec nu;       // for equilibrium
};

/// Uniform positions; orientations per `init`. Deterministic in `seed`.
ParticleState make_state(std::size_t n, double box, std::uint64_t seed, const InitialOrientation& init);

/// Wrap a coordinate vector into [0, box)^3.
Vec3 wrap_position(const Vec3& x, double box);

/// J / |J| with J = sum_j K(|x - X_j|) omega_j (minimum image). Falls back to
/// `self` when |J| < 1e-12.
UnitVec neighbor_mean_direction(const ParticleState& state, const Vec3& x, const ModelParams& params,
                                const UnitVec& self);

/// Raw kernel sums J_i = sum_j K(|X_i - X_j|) omega_j (self included) for every particle.
std::vector<Vec3> neighbor_sums(const ParticleState& state, const ModelParams& params, Exec exec = Exec::parallel);

/// Mean directions for every particle, from the same snapshot.
std::vector<UnitVec> neighbor_mean_directions(const ParticleState& state, const ModelParams& params,
                                              Exec exec = Exec::parallel);

/// Deterministic part of the discrete rule for a prescribed mean direction:
/// omega + dt nu(omega . target) (Id - omega omega^T) target, renormalized.
UnitVec discrete_relaxation(const UnitVec& omega, const UnitVec& target, const NuSpec& nu, double dt);

/// Discrete rule: X += dt omega; omega += dt nu (Id - omega omega^T) omega_bar,
/// renormalize; then a tangent Gaussian kick of covariance 2 d dt, renormalize.
/// Throws std::invalid_argument unless max(nu) dt <= 1.
ParticleState step_discrete(const ParticleState& state, double dt, const ModelParams& params,
                            Exec exec = Exec::parallel);

/// Euler-Maruyama: omega += (Id - omega omega^T)(nu omega_bar dt + sqrt(2 d dt) xi), renormalize.
ParticleState step_continuous(const ParticleState& state, double dt, const ModelParams& params,
                              Exec exec = Exec::parallel);

/// Strang splitting of the same SDE with omega_bar frozen over the step:
/// exact relaxation towards omega_bar for dt/2, an exact Brownian increment on
/// S^2 for dt (geodesic angle drawn from the heat-kernel CDF), relaxation for
/// dt/2. Weak second order, so its stationary law is accurate at much larger
/// dt than Euler-Maruyama.
class SplitStepper {
 public:
  SplitStepper(const ModelParams& params, double dt);
  ParticleState step(const ParticleState& state, Exec exec = Exec::parallel) const;
  double dt() const { return dt_; }

  /// CDF of cos(alpha) for Brownian motion on S^2 after time t at diffusion d.
  static double heat_kernel_cdf(double mu, double d, double t);

 private:
  ModelParams params_;
  double dt_;
  InverseCdfTable angle_table_;
  bool small_angle_ = false;
};

/// Mean of orientations, |sum omega| / N.
double order_parameter(const ParticleState& state);
Vec3 mean_orientation(const ParticleState& state);

struct BinSpec {
  int nx = 1, ny = 1, nz = 1;
  std::size_t count() const { return static_cast<std::size_t>(nx) * ny * nz; }
};

struct MomentField {
  BinSpec bins;
  double bin_volume = 1.0;
  std::size_t n_particles = 0;
  std::vector<std::size_t> counts;
  std::vector<double> rho;  // count / (N * bin volume)
  std::vector<Vec3> j;      // sum omega / (N * bin volume)

  std::size_t index(int ix, int iy, int iz) const { return (static_cast<std::size_t>(iz) * bins.ny + iy) * bins.nx + ix; }
  /// sum of counts; equals N.
  std::size_t total_mass() const;
};

/// Per-bin density and flux. Both drivers sum each bin in particle-index order,
/// so they agree bit for bit.
MomentField compute_moments(const ParticleState& state, const BinSpec& bins, Exec exec = Exec::parallel);

}  // namespace cva
