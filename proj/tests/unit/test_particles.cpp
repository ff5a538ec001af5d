#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <numbers>

#include "cva/equilibrium.hpp"
#include "cva/particles.hpp"
#include "cva/quadrature.hpp"

using namespace cva;

namespace {

ModelParams params_with(double radius, KernelSpec::Shape shape = KernelSpec::Shape::ball, double d = 0.5) {
  ModelParams p;
  p.kernel.shape = shape;
  p.kernel.radius = radius;
  p.d = d;
  return p;
}

void check_same(const ParticleState& a, const ParticleState& b) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.positions[i] == b.positions[i]);
    CHECK(a.orientations[i].vec() == b.orientations[i].vec());
  }
}

}  // namespace

TEST_SUITE("particles") {

TEST_CASE("kernel shapes") {
  const auto ball = KernelSpec::parse("ball", 2.0);
  CHECK(ball(2.0) == 1.0);
  CHECK(ball(2.01) == 0.0);
  const auto bump = KernelSpec::parse("bump", 1.0);
  CHECK(bump(0.0) == doctest::Approx(1.0));
  CHECK(bump(1.0) == 0.0);
  CHECK(bump(0.5) < 1.0);
  CHECK_THROWS_AS(KernelSpec::parse("box", 1.0), std::invalid_argument);
  CHECK_THROWS_AS(KernelSpec::parse("ball", 0.0), std::invalid_argument);
}

TEST_CASE("initial states are deterministic and valid") {
  InitialOrientation init;
  const auto a = make_state(5000, 4.0, 17, init);
  const auto b = make_state(5000, 4.0, 17, init);
  check_same(a, b);
  a.validate();
  CHECK(order_parameter(a) < 0.05);
  init.kind = InitialOrientation::Kind::aligned;
  init.axis = UnitVec::e1();
  CHECK(order_parameter(make_state(100, 1.0, 1, init)) == doctest::Approx(1.0));
  init.kind = InitialOrientation::Kind::equilibrium;
  init.d = 0.5;
  const auto e = make_state(100000, 1.0, 3, init);
  CHECK(mean_orientation(e).dot(UnitVec::e1().vec()) == doctest::Approx(1.0 / std::tanh(2.0) - 0.5).epsilon(0.01));
}

TEST_CASE("wrapping") {
  const Vec3 w = wrap_position(Vec3(-0.5, 10.5, 3.0), 10.0);
  CHECK(w.x() == doctest::Approx(9.5));
  CHECK(w.y() == doctest::Approx(0.5));
  CHECK(w.z() == doctest::Approx(3.0));
  CHECK(wrap_position(Vec3(-1e-18, 0, 0), 10.0).x() < 10.0);
}

TEST_CASE("cell list agrees with the direct sum") {
  struct Case {
    double box, radius;
    KernelSpec::Shape shape;
  };
  for (const Case& c : {Case{10.0, 1.0, KernelSpec::Shape::ball}, Case{10.0, 1.3, KernelSpec::Shape::bump},
                        Case{3.0, 1.5, KernelSpec::Shape::ball}, Case{2.0, 1.8, KernelSpec::Shape::ball},
                        Case{7.0, 1.0, KernelSpec::Shape::ball}}) {
    const auto s = make_state(3000, c.box, 5, InitialOrientation{});
    const auto p = params_with(c.radius, c.shape);
    const auto fast = neighbor_mean_directions(s, p, Exec::serial);
    const auto par = neighbor_mean_directions(s, p, Exec::parallel);
    for (std::size_t i = 0; i < s.size(); i += 7) {
      const auto slow = neighbor_mean_direction(s, s.positions[i], p, s.orientations[i]);
      CHECK((fast[i].vec() - slow.vec()).norm() < 1e-12);
      CHECK(fast[i].vec() == par[i].vec());
    }
  }
}

TEST_CASE("serial and parallel drivers give identical trajectories") {
  set_num_threads(4);
  const auto s0 = make_state(4000, 6.0, 21, InitialOrientation{});
  const auto p = params_with(1.0);
  const SplitStepper split(p, 0.1);
  ParticleState a = s0, b = s0;
  for (int k = 0; k < 3; ++k) {
    a = step_discrete(a, 0.05, p, Exec::serial);
    b = step_discrete(b, 0.05, p, Exec::parallel);
  }
  check_same(a, b);
  for (int k = 0; k < 3; ++k) {
    a = step_continuous(a, 0.05, p, Exec::serial);
    b = step_continuous(b, 0.05, p, Exec::parallel);
    a = split.step(a, Exec::serial);
    b = split.step(b, Exec::parallel);
  }
  check_same(a, b);
  CHECK(a.step == 9);
  set_num_threads(0);
}

TEST_CASE("steps preserve invariants") {
  const auto s0 = make_state(2000, 5.0, 2, InitialOrientation{});
  const auto p = params_with(1.0, KernelSpec::Shape::ball, 1.0);
  auto s = step_continuous(s0, 0.01, p);
  s.validate();
  CHECK(s.time == doctest::Approx(0.01));
  s = step_discrete(s, 0.5, p);
  s.validate();
  ModelParams fast = p;
  fast.nu = NuSpec::constant(4.0);
  CHECK_THROWS_AS(step_discrete(s, 0.5, fast), std::invalid_argument);
  CHECK_THROWS_AS(step_continuous(s, 0.0, p), std::invalid_argument);
}

TEST_CASE("free streaming without noise or alignment") {
  auto p = params_with(1.0, KernelSpec::Shape::ball, 0.0);
  p.nu = NuSpec::constant(0.0);
  const auto s0 = make_state(500, 5.0, 8, InitialOrientation{});
  const auto s1 = step_continuous(s0, 0.2, p);
  for (std::size_t i = 0; i < s0.size(); ++i) {
    CHECK(s1.orientations[i].vec() == s0.orientations[i].vec());
    const Vec3 moved = min_image(s1.positions[i], s0.positions[i], 5.0);
    CHECK((moved - 0.2 * s0.orientations[i].vec()).norm() < 1e-12);
  }
}

TEST_CASE("heat kernel CDF") {
  for (double s : {1e-4, 0.01, 0.3, 2.0}) {
    CHECK(SplitStepper::heat_kernel_cdf(-1.0, s, 1.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(SplitStepper::heat_kernel_cdf(1.0, s, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    // E[cos alpha] = 1 - int F = exp(-2 d t)
    const auto rule = graded_rule(s);
    const double mean = 1.0 - rule.integrate([&](double m) { return SplitStepper::heat_kernel_cdf(m, s, 1.0); });
    CHECK(mean == doctest::Approx(std::exp(-2.0 * s)).epsilon(1e-8));
  }
}

TEST_CASE("split stepper reproduces the diffusion autocorrelation") {
  auto p = params_with(1.0, KernelSpec::Shape::ball, 0.5);
  p.nu = NuSpec::constant(0.0);
  const SplitStepper split(p, 0.1);
  auto s = make_state(50000, 10.0, 4, InitialOrientation{});
  const auto s0 = s;
  for (int k = 0; k < 5; ++k) s = split.step(s);
  double corr = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) corr += s.orientations[i].dot(s0.orientations[i]);
  corr /= static_cast<double>(s.size());
  // sd of the mean ~ 0.5 / sqrt(5e4)
  CHECK(std::abs(corr - std::exp(-0.5)) < 0.01);
}

TEST_CASE("moments conserve mass and both drivers agree") {
  const auto s = make_state(10000, 4.0, 9, InitialOrientation{});
  const BinSpec bins{4, 3, 2};
  const auto a = compute_moments(s, bins, Exec::serial);
  const auto b = compute_moments(s, bins, Exec::parallel);
  CHECK(a.total_mass() == s.size());
  double integral = 0.0;
  for (double r : a.rho) integral += r * a.bin_volume;
  CHECK(integral == doctest::Approx(1.0));
  CHECK(a.rho == b.rho);
  for (std::size_t k = 0; k < a.j.size(); ++k) CHECK(a.j[k] == b.j[k]);
  CHECK_THROWS_AS(compute_moments(s, BinSpec{0, 1, 1}), std::invalid_argument);
}

TEST_CASE("model validation") {
  auto p = params_with(1.0);
  p.d = -1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = params_with(1.0);
  p.nu = NuSpec::polynomial({-1.0, 0.5});
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}


ParticleState manual_state(std::vector<Vec3> x, std::vector<UnitVec> o, double box) {
  ParticleState s;
  s.positions = std::move(x);
  s.orientations = std::move(o);
  s.box = box;
  s.seed = 3;
  return s;
}

TEST_CASE("neighbor mean direction examples") {
  const auto p = params_with(1.0, KernelSpec::Shape::ball, 0.0);
  const Vec3 x(2.0, 2.0, 2.0);
  const UnitVec w = UnitVec::normalized(Vec3(0.3, -0.4, 0.5));
  {
    const auto s = manual_state({x}, {w}, 4.0);
    CHECK((neighbor_mean_direction(s, x, p, w).vec() - w.vec()).norm() < 1e-15);
  }
  {
    const auto s = manual_state({x, x + Vec3(0.5, 0, 0)}, {w, w}, 4.0);
    CHECK((neighbor_mean_direction(s, x, p, UnitVec::e1()).vec() - w.vec()).norm() < 1e-15);
  }
  {
    const auto s = manual_state({x, x + Vec3(0.3, 0, 0), x + Vec3(0, 0.3, 0)},
                                {UnitVec::e1(), UnitVec::e2(), UnitVec::e3()}, 4.0);
    const Vec3 expected = Vec3(1, 1, 1) / std::sqrt(3.0);
    CHECK((neighbor_mean_direction(s, x, p, UnitVec::e1()).vec() - expected).norm() < 1e-15);
  }
}

TEST_CASE("discrete rule examples") {
  const auto p = params_with(1.0, KernelSpec::Shape::ball, 0.0);
  const double dt = 0.05;
  SUBCASE("aligned particles only translate") {
    auto s = make_state(300, 3.0, 5, InitialOrientation{InitialOrientation::Kind::aligned, UnitVec::e2()});
    const auto s1 = step_discrete(s, dt, p);
    for (std::size_t i = 0; i < s.size(); ++i) {
      CHECK((s1.orientations[i].vec() - s.orientations[i].vec()).norm() < 1e-15);
      CHECK((min_image(s1.positions[i], s.positions[i], 3.0) - dt * s.orientations[i].vec()).norm() < 1e-12);
    }
  }
  SUBCASE("antipodal particles out of range keep their orientations") {
    const auto s = manual_state({Vec3(1, 1, 1), Vec3(3.5, 3.5, 3.5)}, {UnitVec::e3(), UnitVec::normalized(Vec3(0, 0, -1))}, 6.0);
    const auto s1 = step_discrete(s, dt, p);
    CHECK(s1.orientations[0].vec() == s.orientations[0].vec());
    CHECK(s1.orientations[1].vec() == s.orientations[1].vec());
  }
  SUBCASE("relaxation towards a fixed direction follows the closed form") {
    UnitVec w = UnitVec::e1();
    for (int k = 0; k < 1000; ++k) w = discrete_relaxation(w, UnitVec::e3(), NuSpec(), 0.01);
    CHECK((w.vec() - UnitVec::e3().vec()).norm() < 1e-3);
    // theta(t) = 2 atan(tan(theta0 / 2) e^{-t}) with theta0 = pi/2, t = 10
    const double theta_exact = 2.0 * std::atan(std::exp(-10.0));
    CHECK(std::abs(std::acos(std::clamp(w.vec().z(), -1.0, 1.0)) - theta_exact) < 1e-4);
  }
  SUBCASE("without noise the continuous step agrees with the discrete one to O(dt^2)") {
    const auto s = make_state(400, 3.0, 6, InitialOrientation{});
    for (double h : {0.02, 0.01}) {
      const auto a = step_discrete(s, h, p);
      const auto b = step_continuous(s, h, p);
      double diff = 0.0;
      for (std::size_t i = 0; i < s.size(); ++i)
        diff = std::max(diff, (a.orientations[i].vec() - b.orientations[i].vec()).norm());
      CHECK(diff <= h * h);
    }
  }
}

TEST_CASE("moment examples") {
  SUBCASE("one aligned bin") {
    auto s = make_state(500, 4.0, 7, InitialOrientation{InitialOrientation::Kind::aligned, UnitVec::e1()});
    for (auto& x : s.positions) x = Vec3(0.5, 0.5, 0.5) + 0.1 * (x / 4.0);
    const auto m = compute_moments(s, BinSpec{2, 2, 2});
    const auto b = m.index(0, 0, 0);
    CHECK(m.counts[b] == 500);
    CHECK(m.j[b].norm() / m.rho[b] == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("isotropic flux is within the central-limit bound") {
    const auto s = make_state(80000, 4.0, 8, InitialOrientation{});
    const auto m = compute_moments(s, BinSpec{2, 2, 2});
    for (std::size_t b = 0; b < m.counts.size(); ++b)
      CHECK(m.j[b].norm() / m.rho[b] < 3.0 / std::sqrt(static_cast<double>(m.counts[b])));
  }
}

TEST_CASE("order parameter examples") {
  const auto aligned = make_state(100, 2.0, 9, InitialOrientation{InitialOrientation::Kind::aligned, UnitVec::e2()});
  CHECK(order_parameter(aligned) == doctest::Approx(1.0).epsilon(1e-14));
  const auto pair = manual_state({Vec3(0.1, 0.1, 0.1), Vec3(1, 1, 1)},
                                 {UnitVec::e3(), UnitVec::normalized(Vec3(0, 0, -1))}, 2.0);
  CHECK(order_parameter(pair) < 1e-15);
  InitialOrientation eq{InitialOrientation::Kind::equilibrium, UnitVec::e3()};
  eq.d = 1.0;
  const auto s = make_state(100000, 10.0, 10, eq);
  CHECK(std::abs(order_parameter(s) - (1.0 / std::tanh(1.0) - 1.0)) < 0.01);
}

}
