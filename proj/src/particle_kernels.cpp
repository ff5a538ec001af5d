// Per-particle update kernels. Each kernel is one function of (particle index,
// immutable snapshot); the serial and OpenMP drivers only differ in how they
// iterate, and every particle draws from its own counter-based stream, so the
// two drivers produce identical trajectories.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cell_list.hpp"
#include "cva/rng.hpp"

namespace cva {

namespace detail {

namespace {
constexpr std::size_t kChunk = 4096;
}

Vec3 ordered_orientation_sum(const std::vector<UnitVec>& orientations, Exec exec) {
  const std::size_t n = orientations.size();
  const std::size_t n_chunks = (n + kChunk - 1) / kChunk;
  std::vector<Vec3> partial(n_chunks, Vec3::Zero());
  auto chunk_sum = [&](std::size_t c) {
    Vec3 acc = Vec3::Zero();
    const std::size_t end = std::min(n, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) acc += orientations[i].vec();
    partial[c] = acc;
  };
  if (exec == Exec::serial) {
    for (std::size_t c = 0; c < n_chunks; ++c) chunk_sum(c);
  } else {
#pragma omp parallel for schedule(static) num_threads(num_threads())
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(n_chunks); ++c) chunk_sum(static_cast<std::size_t>(c));
  }
  Vec3 total = Vec3::Zero();
  for (const Vec3& p : partial) total += p;
  return total;
}

CellList::CellList(const ParticleState& state, const KernelSpec& kernel, Exec exec)
    : state_(state), kernel_(kernel), box_(state.box), r2_(kernel.radius * kernel.radius) {
  const std::size_t n = state.size();
  const double half_diagonal = 0.5 * std::sqrt(3.0) * box_;
  if (kernel.shape == KernelSpec::Shape::ball && kernel.radius >= half_diagonal) {
    mode_ = Mode::global;
    global_sum_ = ordered_orientation_sum(state.orientations, exec);
  } else {
    n_side_ = std::min(128, static_cast<int>(std::floor(2.0 * box_ / kernel.radius)));
    mode_ = n_side_ >= 5 ? Mode::cells : Mode::direct;
  }

  perm_.resize(n);
  if (mode_ != Mode::cells) {
    for (std::size_t i = 0; i < n; ++i) perm_[i] = static_cast<std::uint32_t>(i);
    return;
  }

  side_ = box_ / n_side_;
  const std::size_t n_cells = static_cast<std::size_t>(n_side_) * n_side_ * n_side_;
  std::vector<std::uint32_t> cell_of(n);
  cell_start_.assign(n_cells + 1, 0);
  auto coord = [&](double v) { return std::clamp(static_cast<int>(v / side_), 0, n_side_ - 1); };
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& x = state.positions[i];
    const std::size_t c = (static_cast<std::size_t>(coord(x.z())) * n_side_ + coord(x.y())) * n_side_ + coord(x.x());
    cell_of[i] = static_cast<std::uint32_t>(c);
    ++cell_start_[c + 1];
  }
  for (std::size_t c = 0; c < n_cells; ++c) cell_start_[c + 1] += cell_start_[c];
  std::vector<std::uint32_t> fill(cell_start_.begin(), cell_start_.end() - 1);
  for (std::size_t i = 0; i < n; ++i) perm_[fill[cell_of[i]]++] = static_cast<std::uint32_t>(i);

  px_.resize(n);
  py_.resize(n);
  pz_.resize(n);
  ox_.resize(n);
  oy_.resize(n);
  oz_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Vec3& x = state.positions[perm_[k]];
    const Vec3& o = state.orientations[perm_[k]].vec();
    px_[k] = x.x();
    py_[k] = x.y();
    pz_[k] = x.z();
    ox_[k] = o.x();
    oy_[k] = o.y();
    oz_[k] = o.z();
  }
}

Vec3 CellList::scan_direct(const Vec3& x) const {
  Vec3 acc = Vec3::Zero();
  for (std::size_t j = 0; j < state_.size(); ++j) {
    const double r = min_image(state_.positions[j], x, box_).norm();
    const double k = kernel_(r);
    if (k != 0.0) acc += k * state_.orientations[j].vec();
  }
  return acc;
}

Vec3 CellList::kernel_sum(const Vec3& x) const {
  if (mode_ == Mode::global) return global_sum_;
  if (mode_ == Mode::direct) return scan_direct(x);

  const int n = n_side_;
  const int cx = std::clamp(static_cast<int>(x.x() / side_), 0, n - 1);
  const int cy = std::clamp(static_cast<int>(x.y() / side_), 0, n - 1);
  const int cz = std::clamp(static_cast<int>(x.z() / side_), 0, n - 1);
  const bool ball = kernel_.shape == KernelSpec::Shape::ball;
  const double inv_r2 = 1.0 / r2_;

  auto axis_gap = [&](int idx, double v) {
    const double lo = idx * side_, hi = lo + side_;
    return std::max({0.0, lo - v, v - hi});
  };
  auto wrap = [&](int idx, double& shift) {
    if (idx < 0) {
      shift = -box_;
      return idx + n;
    }
    if (idx >= n) {
      shift = box_;
      return idx - n;
    }
    shift = 0.0;
    return idx;
  };

  double jx = 0.0, jy = 0.0, jz = 0.0;
  for (int oz = -2; oz <= 2; ++oz) {
    const double gz = axis_gap(cz + oz, x.z());
    if (gz * gz > r2_) continue;
    double sz;
    const int wz = wrap(cz + oz, sz);
    for (int oy = -2; oy <= 2; ++oy) {
      const double gy = axis_gap(cy + oy, x.y());
      if (gz * gz + gy * gy > r2_) continue;
      double sy;
      const int wy = wrap(cy + oy, sy);
      for (int ox = -2; ox <= 2; ++ox) {
        const double gx = axis_gap(cx + ox, x.x());
        if (gz * gz + gy * gy + gx * gx > r2_) continue;
        double sx;
        const int wx = wrap(cx + ox, sx);
        const std::size_t c = (static_cast<std::size_t>(wz) * n + wy) * n + wx;
        const double qx = x.x() - sx, qy = x.y() - sy, qz = x.z() - sz;
        for (std::uint32_t k = cell_start_[c]; k < cell_start_[c + 1]; ++k) {
          const double dx = px_[k] - qx, dy = py_[k] - qy, dz = pz_[k] - qz;
          const double d2 = dx * dx + dy * dy + dz * dz;
          if (d2 > r2_) continue;
          if (ball) {
            jx += ox_[k];
            jy += oy_[k];
            jz += oz_[k];
          } else {
            const double t = d2 * inv_r2;
            if (t >= 1.0) continue;
            const double w = std::exp(1.0 - 1.0 / (1.0 - t));
            jx += w * ox_[k];
            jy += w * oy_[k];
            jz += w * oz_[k];
          }
        }
      }
    }
  }
  return {jx, jy, jz};
}

}  // namespace detail

namespace {

UnitVec direction_or_self(const Vec3& j, const UnitVec& self) {
  if (j.norm() < 1e-12) return self;
  return UnitVec::normalized(j);
}

std::array<double, 3> gaussian3(CounterRng& rng) {
  const auto a = gaussian_pair(rng);
  const auto b = gaussian_pair(rng);
  return {a[0], a[1], b[0]};
}

// Shared driver: evaluates omega_bar from the snapshot for every particle and
// hands it to `update(i, omega_bar, rng)`, which returns the new orientation.
template <class Update>
ParticleState advance(const ParticleState& state, double dt, const ModelParams& params, Exec exec, Update&& update) {
  state.validate();
  const detail::CellList cells(state, params.kernel, exec);
  ParticleState next = state;
  next.time = state.time + dt;
  next.step = state.step + 1;
  const auto& order = cells.order();
  const auto substream = static_cast<std::uint32_t>(state.step);

  auto body = [&](std::size_t k) {
    const std::size_t i = order[k];
    const UnitVec& omega = state.orientations[i];
    const UnitVec target = direction_or_self(cells.kernel_sum(state.positions[i]), omega);
    CounterRng rng(state.seed, i, substream);
    next.orientations[i] = update(i, omega, target, rng);
    next.positions[i] = wrap_position(state.positions[i] + dt * omega.vec(), state.box);
  };

  const std::size_t n = state.size();
  if (exec == Exec::serial) {
    for (std::size_t k = 0; k < n; ++k) body(k);
  } else {
#pragma omp parallel for schedule(dynamic, 512) num_threads(num_threads())
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(n); ++k) body(static_cast<std::size_t>(k));
  }
  return next;
}

}  // namespace

UnitVec neighbor_mean_direction(const ParticleState& state, const Vec3& x, const ModelParams& params,
                                const UnitVec& self) {
  Vec3 j = Vec3::Zero();
  for (std::size_t k = 0; k < state.size(); ++k) {
    const double w = params.kernel(min_image(state.positions[k], x, state.box).norm());
    if (w != 0.0) j += w * state.orientations[k].vec();
  }
  return direction_or_self(j, self);
}

std::vector<UnitVec> neighbor_mean_directions(const ParticleState& state, const ModelParams& params, Exec exec) {
  const detail::CellList cells(state, params.kernel, exec);
  std::vector<UnitVec> out(state.size());
  auto body = [&](std::size_t i) {
    out[i] = direction_or_self(cells.kernel_sum(state.positions[i]), state.orientations[i]);
  };
  if (exec == Exec::serial) {
    for (std::size_t i = 0; i < state.size(); ++i) body(i);
  } else {
#pragma omp parallel for schedule(dynamic, 512) num_threads(num_threads())
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(state.size()); ++i) body(static_cast<std::size_t>(i));
  }
  return out;
}

std::vector<Vec3> neighbor_sums(const ParticleState& state, const ModelParams& params, Exec exec) {
  const detail::CellList cells(state, params.kernel, exec);
  std::vector<Vec3> out(state.size());
  if (exec == Exec::serial) {
    for (std::size_t i = 0; i < state.size(); ++i) out[i] = cells.kernel_sum(state.positions[i]);
  } else {
#pragma omp parallel for schedule(dynamic, 512) num_threads(num_threads())
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(state.size()); ++i)
      out[i] = cells.kernel_sum(state.positions[i]);
  }
  return out;
}

UnitVec discrete_relaxation(const UnitVec& omega, const UnitVec& target, const NuSpec& nu, double dt) {
  const double rate = nu(omega.dot(target));
  return UnitVec::normalized(omega.vec() + dt * rate * project_tangent(omega, target.vec()));
}

ParticleState step_discrete(const ParticleState& state, double dt, const ModelParams& params, Exec exec) {
  params.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("step_discrete: dt must be > 0");
  if (params.nu.grid_max() * dt > 1.0) throw std::invalid_argument("step_discrete: requires nu * dt <= 1");
  const double kick = std::sqrt(2.0 * params.d * dt);
  return advance(state, dt, params, exec, [&](std::size_t, const UnitVec& omega, const UnitVec& target, CounterRng& rng) {
    const UnitVec relaxed = discrete_relaxation(omega, target, params.nu, dt);
    if (kick == 0.0) return relaxed;
    const auto xi = gaussian3(rng);
    const Vec3 noise = kick * Vec3(xi[0], xi[1], xi[2]);
    return UnitVec::normalized(relaxed.vec() + project_tangent(relaxed, noise));
  });
}

ParticleState step_continuous(const ParticleState& state, double dt, const ModelParams& params, Exec exec) {
  params.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("step_continuous: dt must be > 0");
  const double kick = std::sqrt(2.0 * params.d * dt);
  return advance(state, dt, params, exec, [&](std::size_t, const UnitVec& omega, const UnitVec& target, CounterRng& rng) {
    const double rate = params.nu(omega.dot(target));
    Vec3 incr = rate * dt * target.vec();
    if (kick != 0.0) {
      const auto xi = gaussian3(rng);
      incr += kick * Vec3(xi[0], xi[1], xi[2]);
    }
    if (incr.isZero(0.0)) return omega;
    return UnitVec::normalized(omega.vec() + project_tangent(omega, incr));
  });
}

namespace {

// Exact flow of d(theta)/dt = -nu(cos theta) sin theta towards `target` for time tau.
UnitVec relax_towards(const UnitVec& omega, const UnitVec& target, const NuSpec& nu, double tau) {
  const double m = std::clamp(omega.dot(target), -1.0, 1.0);
  const Vec3 perp = omega.vec() - m * target.vec();
  const double sin_theta = perp.norm();
  if (sin_theta < 1e-15 || tau == 0.0) return omega;
  const double theta = std::atan2(sin_theta, m);
  double theta_new;
  if (nu.family() == NuSpec::Family::constant) {
    theta_new = 2.0 * std::atan(std::tan(0.5 * theta) * std::exp(-nu(0.0) * tau));
  } else {
    // RK4 on theta with steps of at most 0.05 / max(nu).
    const int n_sub = std::max(1, static_cast<int>(std::ceil(tau * nu.grid_max() / 0.05)));
    const double h = tau / n_sub;
    auto f = [&](double t) { return -nu(std::cos(t)) * std::sin(t); };
    theta_new = theta;
    for (int s = 0; s < n_sub; ++s) {
      const double k1 = f(theta_new);
      const double k2 = f(theta_new + 0.5 * h * k1);
      const double k3 = f(theta_new + 0.5 * h * k2);
      const double k4 = f(theta_new + h * k3);
      theta_new += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
  return UnitVec::normalized(std::cos(theta_new) * target.vec() + std::sin(theta_new) * (perp / sin_theta));
}

}  // namespace

ParticleState SplitStepper::step(const ParticleState& state, Exec exec) const {
  const double half = 0.5 * dt_;
  const double d = params_.d;
  return advance(state, dt_, params_, exec, [&](std::size_t, const UnitVec& omega, const UnitVec& target, CounterRng& rng) {
    UnitVec w = relax_towards(omega, target, params_.nu, half);
    if (d > 0.0) {
      const double u = uniform01(rng);
      const double psi = 2.0 * std::numbers::pi * uniform01(rng);
      double cos_a;
      if (small_angle_) {
        // Rayleigh-distributed angle of the tangent-plane Gaussian.
        const double a = std::sqrt(-4.0 * d * dt_ * std::log1p(-u));
        cos_a = std::cos(a);
      } else {
        cos_a = angle_table_.quantile(u);
      }
      const double sin_a = std::sqrt(std::max(0.0, 1.0 - cos_a * cos_a));
      const Frame f = Frame::adapted(w);
      w = UnitVec::normalized(cos_a * w.vec() + sin_a * (std::cos(psi) * f.e1 + std::sin(psi) * f.e2));
    }
    return relax_towards(w, target, params_.nu, half);
  });
}

}  // namespace cva
