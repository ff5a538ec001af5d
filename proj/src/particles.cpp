#include "cva/particles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "cell_list.hpp"
#include "cva/rng.hpp"

namespace cva {

double KernelSpec::operator()(double r) const {
  if (r < 0.0) r = -r;
  if (shape == Shape::ball) return r <= radius ? 1.0 : 0.0;
  const double t = (r / radius) * (r / radius);
  return t < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - t)) : 0.0;
}

KernelSpec KernelSpec::parse(const std::string& shape, double radius) {
  KernelSpec k;
  if (shape == "ball") {
    k.shape = Shape::ball;
  } else if (shape == "bump") {
    k.shape = Shape::bump;
  } else {
    throw std::invalid_argument("unknown kernel shape '" + shape + "' (expected ball or bump)");
  }
  if (!(radius > 0.0)) throw std::invalid_argument("kernel radius must be > 0");
  k.radius = radius;
  return k;
}

std::string KernelSpec::shape_name() const { return shape == Shape::ball ? "ball" : "bump"; }

void ModelParams::validate() const {
  nu.require_nonnegative();
  if (!(d >= 0.0)) throw std::invalid_argument("ModelParams: d must be >= 0");
  if (!(kernel.radius > 0.0)) throw std::invalid_argument("ModelParams: kernel radius must be > 0");
  if (!(epsilon > 0.0)) throw std::invalid_argument("ModelParams: epsilon must be > 0");
}

void ParticleState::validate() const {
  if (orientations.size() != positions.size())
    throw std::invalid_argument("ParticleState: positions and orientations differ in length");
  if (!(box > 0.0)) throw std::invalid_argument("ParticleState: box must be > 0");
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const Vec3& x = positions[i];
    for (int a = 0; a < 3; ++a)
      if (!(x[a] >= 0.0 && x[a] < box))
        throw std::invalid_argument("ParticleState: particle " + std::to_string(i) + " outside the box");
    if (std::abs(orientations[i].vec().norm() - 1.0) > 1e-12)
      throw std::invalid_argument("ParticleState: orientation " + std::to_string(i) + " not unit");
  }
}

Vec3 wrap_position(const Vec3& x, double box) {
  Vec3 y;
  for (int a = 0; a < 3; ++a) {
    double v = x[a] - box * std::floor(x[a] / box);
    if (v >= box) v = 0.0;  // rounding of tiny negatives
    y[a] = v;
  }
  return y;
}

ParticleState make_state(std::size_t n, double box, std::uint64_t seed, const InitialOrientation& init) {
  if (!(box > 0.0)) throw std::invalid_argument("make_state: box must be > 0");
  ParticleState s;
  s.box = box;
  s.seed = seed;
  s.positions.resize(n);
  s.orientations.resize(n);
  const std::uint64_t init_seed = seed ^ 0x9E3779B97F4A7C15ull;

  std::optional<EquilibriumDist> eq;
  Frame frame;
  if (init.kind == InitialOrientation::Kind::equilibrium) {
    eq = normalize(init.d, init.nu);
    frame = Frame::adapted(init.axis);
  }

  for (std::size_t i = 0; i < n; ++i) {
    CounterRng rng(init_seed, i, 0);
    Vec3 x(uniform01(rng), uniform01(rng), uniform01(rng));
    s.positions[i] = wrap_position(box * x, box);
    switch (init.kind) {
      case InitialOrientation::Kind::aligned:
        s.orientations[i] = init.axis;
        break;
      case InitialOrientation::Kind::isotropic: {
        const double mu = 2.0 * uniform01(rng) - 1.0;
        const double phi = 2.0 * std::numbers::pi * uniform01(rng);
        s.orientations[i] = from_spherical({std::acos(mu), phi}, Frame::lab());
        break;
      }
      case InitialOrientation::Kind::equilibrium: {
        const double mu = eq->cos_theta_table().quantile(uniform01(rng));
        const double phi = 2.0 * std::numbers::pi * uniform01(rng);
        s.orientations[i] = from_spherical({std::acos(std::clamp(mu, -1.0, 1.0)), phi}, frame);
        break;
      }
    }
  }
  return s;
}

double SplitStepper::heat_kernel_cdf(double mu, double d, double t) {
  mu = std::clamp(mu, -1.0, 1.0);
  const double s = d * t;
  if (!(s > 0.0)) return mu >= 1.0 ? 1.0 : 0.0;
  // Terms decay like exp(-l^2 s); stop once below 1e-18.
  const int l_max = std::min(5000, static_cast<int>(std::ceil(std::sqrt(41.5 / s))) + 2);
  double p_prev = 1.0, p_cur = mu;  // P_{l-1}, P_l with l = 1
  double sum = 0.0;
  for (int l = 1; l <= l_max; ++l) {
    const double p_next = ((2.0 * l + 1.0) * mu * p_cur - l * p_prev) / (l + 1.0);
    sum += std::exp(-static_cast<double>(l) * (l + 1) * s) * (p_next - p_prev);
    p_prev = p_cur;
    p_cur = p_next;
  }
  return std::clamp(0.5 * (mu + 1.0) + 0.5 * sum, 0.0, 1.0);
}

SplitStepper::SplitStepper(const ModelParams& params, double dt) : params_(params), dt_(dt) {
  params_.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("SplitStepper: dt must be > 0");
  const double s = params_.d * dt;
  if (s == 0.0) return;
  // Below this the series needs more than 5000 terms and the planar limit
  // is accurate to O(s).
  small_angle_ = s < 2e-6;
  if (!small_angle_) {
    const double d = params_.d;
    angle_table_ = InverseCdfTable::from_cdf([d, dt](double mu) { return heat_kernel_cdf(mu, d, dt); }, 2.0 * s);
  }
}

Vec3 mean_orientation(const ParticleState& state) {
  if (state.size() == 0) return Vec3::Zero();
  return detail::ordered_orientation_sum(state.orientations, Exec::serial) / static_cast<double>(state.size());
}

double order_parameter(const ParticleState& state) { return mean_orientation(state).norm(); }

std::size_t MomentField::total_mass() const {
  std::size_t m = 0;
  for (std::size_t c : counts) m += c;
  return m;
}

MomentField compute_moments(const ParticleState& state, const BinSpec& bins, Exec exec) {
  if (bins.nx < 1 || bins.ny < 1 || bins.nz < 1) throw std::invalid_argument("compute_moments: bin counts must be >= 1");
  const std::size_t n = state.size();
  if (n == 0) throw std::invalid_argument("compute_moments: no particles");
  MomentField m;
  m.bins = bins;
  m.n_particles = n;
  m.bin_volume = (state.box / bins.nx) * (state.box / bins.ny) * (state.box / bins.nz);
  const std::size_t nb = bins.count();
  m.counts.assign(nb, 0);
  m.rho.assign(nb, 0.0);
  m.j.assign(nb, Vec3::Zero());

  std::vector<std::uint32_t> bin_of(n);
  auto coord = [&](double v, int k) { return std::clamp(static_cast<int>(v / state.box * k), 0, k - 1); };
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& x = state.positions[i];
    bin_of[i] = static_cast<std::uint32_t>(m.index(coord(x.x(), bins.nx), coord(x.y(), bins.ny), coord(x.z(), bins.nz)));
  }

  const double scale = 1.0 / (static_cast<double>(n) * m.bin_volume);
  if (exec == Exec::serial) {
    for (std::size_t i = 0; i < n; ++i) {
      ++m.counts[bin_of[i]];
      m.j[bin_of[i]] += state.orientations[i].vec();
    }
  } else {
    // Stable counting sort by bin keeps particle-index order inside each bin.
    std::vector<std::size_t> start(nb + 1, 0);
    for (std::size_t i = 0; i < n; ++i) ++start[bin_of[i] + 1];
    for (std::size_t b = 0; b < nb; ++b) start[b + 1] += start[b];
    std::vector<std::uint32_t> sorted(n);
    std::vector<std::size_t> fill(start.begin(), start.end() - 1);
    for (std::size_t i = 0; i < n; ++i) sorted[fill[bin_of[i]]++] = static_cast<std::uint32_t>(i);
#pragma omp parallel for schedule(dynamic, 16) num_threads(num_threads())
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nb); ++b) {
      Vec3 acc = Vec3::Zero();
      for (std::size_t k = start[b]; k < start[b + 1]; ++k) acc += state.orientations[sorted[k]].vec();
      m.j[b] = acc;
      m.counts[b] = start[b + 1] - start[b];
    }
  }
  for (std::size_t b = 0; b < nb; ++b) {
    m.rho[b] = static_cast<double>(m.counts[b]) * scale;
    m.j[b] *= scale;
  }
  return m;
}

}  // namespace cva
