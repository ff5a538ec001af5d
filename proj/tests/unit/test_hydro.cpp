#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <complex>
#include <numbers>
#include <random>

#include "cva/gci.hpp"
#include "cva/hydro.hpp"

using namespace cva;

namespace {

constexpr double kPi = std::numbers::pi;

HydroState1D make_wave(int n, double theta0, double amp, RescaledCoefficients k) {
  HydroState1D s;
  s.length = 1.0;
  s.coeffs = k;
  for (int i = 0; i < n; ++i) {
    const double z = (i + 0.5) / n;
    s.rho.push_back(1.0 + amp * std::sin(2.0 * kPi * z));
    s.theta.push_back(theta0 + amp * std::cos(2.0 * kPi * z));
    s.phi.push_back(1.0 + amp * std::sin(4.0 * kPi * z));
  }
  return s;
}

}  // namespace

TEST_SUITE("hydro") {

TEST_CASE("rescaling") {
  HydroCoefficients raw;
  raw.c1 = 0.5;
  raw.c2 = 0.25;
  raw.lambda = 1.0;
  const auto r = rescale(raw);
  CHECK(r.c == 0.5);
  CHECK(r.lambda == 2.0);
  raw.c1 = 0.0;
  CHECK_THROWS_AS(rescale(raw), std::invalid_argument);
}

TEST_CASE("rescaled golden row is consistent with the solver") {
  const auto k = coefficients(1.0, NuSpec::constant(1.0), 512);
  const auto r = rescale(k);
  CHECK(r.c == doctest::Approx(0.164778925664550 / k.c1).epsilon(1e-5));
  CHECK(r.lambda == doctest::Approx(1.0 / k.c1).epsilon(1e-10));
}

TEST_CASE("flux matrix structure") {
  const Mat3 a = flux_matrix(2.0, 0.0, 0.7, 1.3);
  CHECK((a - Vec3(1.0, 0.7, 0.7).asDiagonal().toDenseMatrix()).norm() < 1e-15);
  CHECK_THROWS_AS(flux_matrix(0.0, 0.3, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("closed-form eigenvalues match a 3x3 eigensolver") {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> th(0.0, kPi), cc(0.05, 3.0), ll(0.01, 5.0), rr(0.1, 4.0);
  for (int i = 0; i < 100; ++i) {
    const double theta = th(gen), c = cc(gen), lambda = ll(gen), rho = rr(gen);
    const auto e = eigenvalues(theta, c, lambda);
    Eigen::EigenSolver<Mat3> solver(flux_matrix(rho, theta, c, lambda));
    std::vector<double> num;
    for (int k = 0; k < 3; ++k) {
      CHECK(std::abs(solver.eigenvalues()[k].imag()) < 1e-10);
      num.push_back(solver.eigenvalues()[k].real());
    }
    std::sort(num.begin(), num.end());
    std::vector<double> closed{e.gamma_minus, e.gamma_0, e.gamma_plus};
    std::sort(closed.begin(), closed.end());
    for (int k = 0; k < 3; ++k) CHECK(std::abs(num[k] - closed[k]) < 1e-10);
    CHECK(e.gamma_minus <= e.gamma_plus);
  }
}

TEST_CASE("eigenvalue special cases") {
  const auto a = eigenvalues(0.0, 1.7, 0.9);
  CHECK(a.gamma_0 == doctest::Approx(1.7));
  CHECK(a.gamma_plus == doctest::Approx(1.7));
  CHECK(a.gamma_minus == doctest::Approx(1.0));
  const auto b = eigenvalues(0.0, 0.8, 0.9);
  CHECK(b.gamma_plus == doctest::Approx(1.0));
  CHECK(b.gamma_minus == doctest::Approx(0.8));
  // Normal propagation: the (rho, theta) block is [[0, -rho], [-lambda/rho, 0]],
  // so the sound speeds are +-sqrt(lambda).
  const auto c = eigenvalues(kPi / 2, 0.8, 2.25);
  CHECK(std::abs(c.gamma_0) < 1e-15);
  CHECK(c.gamma_plus == doctest::Approx(1.5));
  CHECK(c.gamma_minus == doctest::Approx(-1.5));
  const auto d = eigenvalues(kPi / 4, 1.0, 1.0);
  CHECK(d.gamma_plus == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(std::abs(d.gamma_minus) < 1e-15);
  CHECK_THROWS_AS(eigenvalues(0.3, 1.0, -1.0), std::domain_error);
}

TEST_CASE("eigenvectors diagonalize the flux matrix") {
  for (double theta : {0.0, 0.3, kPi / 3, kPi / 2, 2.5, kPi}) {
    for (double c : {0.5, 1.0, 1.5}) {
      const Mat3 a = flux_matrix(1.3, theta, c, 0.7);
      const Mat3 v = eigenvectors(1.3, theta, c, 0.7);
      const auto e = eigenvalues(theta, c, 0.7);
      const Vec3 g(e.gamma_minus, e.gamma_0, e.gamma_plus);
      CHECK((a * v - v * g.asDiagonal()).norm() < 1e-12);
      CHECK(std::abs(v.determinant()) > 1e-6);
    }
  }
}

TEST_CASE("hyperbolicity sweep") {
  const auto r = hyperbolicity_report(1.0, 1.0, 181);
  CHECK(r.entries.size() == 181);
  CHECK(r.all_hyperbolic());
  const auto z = hyperbolicity_report(0.5, 0.0, 3);
  CHECK(std::find(z.degenerate_thetas.begin(), z.degenerate_thetas.end(), kPi / 2) != z.degenerate_thetas.end());
  CHECK_THROWS_AS(hyperbolicity_report(1.0, 1.0, 2), std::invalid_argument);
}

TEST_CASE("constant states are preserved exactly") {
  for (double theta0 : {0.0, 0.4, kPi / 2, kPi}) {
    HydroState1D s;
    s.coeffs = {0.6, 2.0};
    s.rho.assign(64, 1.7);
    s.theta.assign(64, theta0);
    s.phi.assign(64, 2.1);
    auto t = s;
    for (int k = 0; k < 10; ++k) t = step_hydro(t, stable_dt(t), Exec::serial);
    CHECK(t.rho == s.rho);
    CHECK(t.theta == s.theta);
    CHECK(t.phi == s.phi);
  }
}

TEST_CASE("mass is conserved per step and drivers agree bit for bit") {
  auto s = make_wave(200, 1.0, 0.2, {0.6, 2.0});
  auto p = s;
  for (int k = 0; k < 50; ++k) {
    const double dt = stable_dt(s);
    const double m0 = s.mass();
    s = step_hydro(s, dt, Exec::serial);
    p = step_hydro(p, dt, Exec::parallel);
    CHECK(std::abs(s.mass() - m0) <= 1e-12 * m0);
  }
  CHECK(s.rho == p.rho);
  CHECK(s.theta == p.theta);
  CHECK(s.phi == p.phi);
  s.validate();
}

TEST_CASE("angles stay in their charts") {
  auto s = make_wave(100, 0.02, 0.05, {1.2, 1.0});
  for (int k = 0; k < 200; ++k) s = step_hydro(s, stable_dt(s), Exec::serial);
  s.validate();
}

TEST_CASE("CFL violation and non-positive density abort") {
  auto s = make_wave(64, 1.0, 0.1, {1.0, 1.0});
  CHECK_THROWS_AS(step_hydro(s, 2.0 * stable_dt(s), Exec::serial), NumericalError);
  CHECK_THROWS_AS(step_hydro(s, -1.0, Exec::serial), NumericalError);
}

TEST_CASE("smooth solutions converge at least at first order") {
  auto run = [](int n) {
    auto s = make_wave(n, 1.0, 0.05, {0.6, 2.0});
    const double t_end = 0.1;
    const double dt0 = 0.5 * s.dz() / max_wave_speed(s) / 1.2;
    const int steps = static_cast<int>(std::ceil(t_end / dt0));
    for (int k = 0; k < steps; ++k) s = step_hydro(s, t_end / steps, Exec::serial);
    return s;
  };
  auto coarse_error = [](const HydroState1D& c, const HydroState1D& f) {
    const std::size_t r = f.size() / c.size();
    double e = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      double avg = 0.0;
      for (std::size_t k = 0; k < r; ++k) avg += f.rho[i * r + k];
      e = std::max(e, std::abs(c.rho[i] - avg / r));
    }
    return e;
  };
  // Each error is measured against a 4x finer run.
  const double e1 = coarse_error(run(100), run(400));
  const double e2 = coarse_error(run(200), run(800));
  CHECK(e1 / e2 > 1.8);
}

}
