// Acceptance suite: one PASS/FAIL line per criterion. `--only N` runs a single
// criterion. Exit status 0 when every selected criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "cva/equilibrium.hpp"
#include "cva/gci.hpp"
#include "cva/hydro.hpp"
#include "cva/sphere.hpp"
#include "cva/workbench/experiments.hpp"

using namespace cva;
using namespace cva::wb;

namespace {

constexpr double kPi = std::numbers::pi;

// Collocation reference, tests/oracles/gci_collocation.py.
constexpr double kGoldenC2 = 0.164778925664550;

// Pre-registered seeds for the Monte Carlo criteria.
constexpr std::uint64_t kRelaxationSeed = 12345;
constexpr std::uint64_t kAutocorrelationSeed = 777;
constexpr std::uint64_t kOrderSeed = 2024;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Criterion {
  int id;
  const char* title;
  double budget_s;
  std::function<void(Outcome&)> run;
};

// ---------------------------------------------------------------------------

void closed_form_coefficients(Outcome& o) {
  double c1_err = 0.0, c1_fe_err = 0.0, lambda_err = 0.0;
  for (double d : {0.01, 0.1, 1.0, 10.0, 100.0}) {
    const double exact = 1.0 / std::tanh(1.0 / d) - d;
    c1_err = std::max(c1_err, std::abs(c1(normalize(d, NuSpec())) - exact));
    const auto k = coefficients(d, NuSpec(), 512);
    c1_fe_err = std::max(c1_fe_err, std::abs(k.c1 - exact));
    lambda_err = std::max(lambda_err, std::abs(k.lambda - d));
  }
  o.detail << "max |c1 - (coth(1/d) - d)| = " << num(c1_err) << " (pipeline " << num(c1_fe_err)
           << "), max |lambda - d| = " << num(lambda_err);
  o.require(c1_err < 1e-10 && c1_fe_err < 1e-10, "c1 error >= 1e-10");
  o.require(lambda_err < 1e-10, "lambda error >= 1e-10");
}

void gci_limit(Outcome& o) {
  const auto sol = solve_g(1e6, NuSpec(), 512);
  double err = 0.0;
  for (std::size_t i = 0; i < sol.mu_nodes.size(); ++i) {
    const double mu = sol.mu_nodes[i];
    err = std::max(err, std::abs(sol.g_values[i] + 0.5 * std::sqrt(std::max(0.0, 1.0 - mu * mu))));
  }
  double g_max = -1.0;
  int cases = 0;
  for (const auto& nu : {NuSpec(), NuSpec::constant(0.5), NuSpec::polynomial({1.0, 0.0, 0.5}),
                         NuSpec::polynomial({2.0, 1.0}), NuSpec::polynomial({1.0, -0.5, 0.25})})
    for (double d : {0.01, 0.1, 0.5, 1.0, 10.0, 1e6}) {
      const auto s = solve_g(d, nu, 512);
      for (double g : s.g_values) g_max = std::max(g_max, g);
      ++cases;
    }
  o.detail << "d=1e6 max-norm error " << num(err) << "; max g over " << cases << " (d, nu) cases = " << num(g_max);
  o.require(err < 1e-3, "limit profile error >= 1e-3");
  o.require(g_max <= 1e-10, "maximum principle violated");
}

void independent_discretization(Outcome& o) {
  const auto k = coefficients(1.0, NuSpec(), 512);
  const double diff = std::abs(k.c2 - kGoldenC2);
  char buf[96];
  std::snprintf(buf, sizeof buf, "c2 = %.12f vs collocation %.12f", k.c2, kGoldenC2);
  o.detail << buf << ", |diff| = " << num(diff);
  o.require(diff < 1e-6, "difference >= 1e-6");
}

void limits(Outcome& o) {
  const double small = c1(normalize(1e-4, NuSpec()));
  const double large = c1(normalize(1e4, NuSpec()));
  o.detail << "c1(1e-4) = " << small << ", c1(1e4) = " << num(large);
  o.require(small > 0.999, "c1(1e-4) <= 0.999");
  o.require(large < 1e-3, "c1(1e4) >= 1e-3");
}

void eigenvalue_cases(Outcome& o) {
  // theta = 0: {c, c, 1}
  double pole_err = 0.0;
  for (double c : {0.3, 0.8, 1.7})
    for (double lambda : {0.5, 2.0}) {
      const auto e = eigenvalues(0.0, c, lambda);
      std::vector<double> got{e.gamma_minus, e.gamma_0, e.gamma_plus}, want{c, c, 1.0};
      std::sort(got.begin(), got.end());
      std::sort(want.begin(), want.end());
      for (int k = 0; k < 3; ++k) pole_err = std::max(pole_err, std::abs(got[k] - want[k]));
    }
  // theta = pi/2: the literal target {0, +-2 sqrt(lambda)}; the closed form gives +-sqrt(lambda).
  double normal_err = 0.0, normal_err_sqrt = 0.0;
  for (double c : {0.3, 0.8, 1.7})
    for (double lambda : {0.25, 1.0, 2.25}) {
      const auto e = eigenvalues(kPi / 2, c, lambda);
      normal_err = std::max({normal_err, std::abs(e.gamma_0), std::abs(e.gamma_plus - 2.0 * std::sqrt(lambda)),
                             std::abs(e.gamma_minus + 2.0 * std::sqrt(lambda))});
      normal_err_sqrt = std::max({normal_err_sqrt, std::abs(e.gamma_0), std::abs(e.gamma_plus - std::sqrt(lambda)),
                                  std::abs(e.gamma_minus + std::sqrt(lambda))});
    }
  // Random comparison against a dense 3x3 eigensolver.
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> th(0.0, kPi), cc(0.05, 3.0), ll(0.01, 5.0), rr(0.1, 4.0);
  double brute_err = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double theta = th(gen), c = cc(gen), lambda = ll(gen), rho = rr(gen);
    const auto e = eigenvalues(theta, c, lambda);
    Eigen::EigenSolver<Mat3> solver(flux_matrix(rho, theta, c, lambda));
    std::vector<double> num_ev, closed{e.gamma_minus, e.gamma_0, e.gamma_plus};
    for (int k = 0; k < 3; ++k) {
      brute_err = std::max(brute_err, std::abs(solver.eigenvalues()[k].imag()));
      num_ev.push_back(solver.eigenvalues()[k].real());
    }
    std::sort(num_ev.begin(), num_ev.end());
    std::sort(closed.begin(), closed.end());
    for (int k = 0; k < 3; ++k) brute_err = std::max(brute_err, std::abs(num_ev[k] - closed[k]));
  }
  bool sweep_ok = true;
  for (double c : {0.3, 0.53, 1.0, 1.7})
    for (double lambda : {0.1, 1.0, 3.2}) sweep_ok = sweep_ok && hyperbolicity_report(c, lambda, 181).all_hyperbolic();

  o.detail << "theta=0 error " << num(pole_err) << "; theta=pi/2 vs {0, +-2 sqrt(lambda)} error " << num(normal_err)
           << " (vs {0, +-sqrt(lambda)}: " << num(normal_err_sqrt) << "); 100 random vs eigensolver "
           << num(brute_err) << "; 1-degree hyperbolicity sweep " << (sweep_ok ? "ok" : "failed");
  o.require(pole_err < 1e-14, "theta = 0 special case");
  o.require(normal_err < 1e-14,
            "theta = pi/2 gives +-sqrt(lambda), not +-2 sqrt(lambda): the (rho, theta) block of the flux matrix is "
            "[[0, -rho], [-lambda/rho, 0]], whose eigenvalues are +-sqrt(lambda)");
  o.require(brute_err < 1e-10, "closed form vs eigensolver");
  o.require(sweep_ok, "hyperbolicity sweep");
}

void hydro_waves(Outcome& o) {
  const auto golden = rescale(coefficients(1.0, NuSpec(), 512));
  struct Case {
    double theta, c, lambda;
  };
  const Case cases[] = {{0.0, 0.8, 1.0}, {kPi / 3, golden.c, golden.lambda}, {kPi / 2, golden.c, 1.0}};
  double worst = 0.0;
  int measured = 0, skipped = 0;
  for (const auto& cs : cases) {
    WaveSpeedParams p;
    p.theta0 = cs.theta;
    p.c = cs.c;
    p.lambda = cs.lambda;
    const auto r = measure_wave_speeds(p);
    int here = 0;
    for (const auto& m : r.modes) {
      if (!m.measured_ok) {
        ++skipped;
        continue;
      }
      ++here;
      worst = std::max(worst, m.error);
      o.require(!m.contaminated, "nonlinear contamination at theta0 = " + num(cs.theta));
    }
    measured += here;
    o.require(here > 0, "no measurable mode at theta0 = " + num(cs.theta));
  }

  // Mass per step on a finite-amplitude wave.
  HydroState1D s;
  s.coeffs = golden;
  const int n = 200;
  for (int i = 0; i < n; ++i) {
    const double z = (i + 0.5) / n;
    s.rho.push_back(1.0 + 0.2 * std::sin(2 * kPi * z));
    s.theta.push_back(1.0 + 0.2 * std::cos(2 * kPi * z));
    s.phi.push_back(1.0 + 0.3 * std::sin(4 * kPi * z));
  }
  double drift = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double m0 = s.mass();
    s = step_hydro(s, stable_dt(s, 0.8));
    drift = std::max(drift, std::abs(s.mass() - m0) / m0);
  }
  // Constant states, including both poles.
  bool constant_ok = true;
  for (double theta0 : {0.0, 0.7, kPi / 2, kPi}) {
    HydroState1D c;
    c.coeffs = golden;
    c.rho.assign(64, 1.3);
    c.theta.assign(64, theta0);
    c.phi.assign(64, 4.0);
    auto t = c;
    for (int k = 0; k < 20; ++k) t = step_hydro(t, stable_dt(t, 0.8));
    constant_ok = constant_ok && t.rho == c.rho && t.theta == c.theta && t.phi == c.phi;
  }
  o.detail << measured << " modes measured (" << skipped << " pole modes skipped), worst speed error " << num(worst)
           << "; max mass drift per step " << num(drift) << "; constant states "
           << (constant_ok ? "bit-exact" : "changed");
  o.require(worst < 0.02, "wave speed error >= 2%");
  o.require(drift <= 1e-12, "mass drift per step > 1e-12");
  o.require(constant_ok, "constant state not preserved");
}

void sde_stationarity(Outcome& o) {
  const auto r = run_relaxation(RelaxationParams{}, kRelaxationSeed);
  const auto a = run_autocorrelation(AutocorrelationParams{}, kAutocorrelationSeed);
  o.detail << "L1 = " << num(r.l1) << ", final order " << num(r.final_order) << ", H moving average "
           << (r.h_non_increasing ? "non-increasing" : "increasing") << " (noise floor " << num(r.h_noise_floor)
           << "); autocorrelation max |z| = " << num(a.max_abs_z);
  o.require(r.l1 < 0.05, "L1 >= 0.05");
  o.require(r.h_non_increasing, "H trend increases");
  o.require(a.max_abs_z <= 3.0, "autocorrelation outside 3 sigma");
}

void order_vs_theory(Outcome& o) {
  const auto r = run_order_vs_c1(OrderSweepParams{}, kOrderSeed);
  o.detail << "box " << num(r.box) << ", " << num(r.particles_per_ball) << " per ball; deviations";
  for (const auto& row : r.rows) {
    o.detail << " d=" << row.d << ":" << num(100.0 * row.rel_deviation) << "%";
    o.require(std::abs(row.rel_deviation) < 0.1, "d = " + num(row.d) + " outside 10%");
  }
  o.detail << "; Spearman " << num(r.spearman) << ", max jump / median " << num(r.max_jump_ratio);
  o.require(r.spearman < 0.0, "order not decreasing in d");
  o.require(r.max_jump_ratio < 3.0, "jump ratio >= 3");
}

void kernel_expansion(Outcome& o) {
  const auto r = run_kernel_expansion(KernelExpansionParams{});
  o.detail << "slope " << num(r.fit.slope) << ", R^2 " << r.fit.r2 << ", halving ratios";
  for (double q : r.ratios) o.detail << " " << num(q);
  o.require(r.fit.slope >= 1.8 && r.fit.slope <= 2.2, "slope outside [1.8, 2.2]");
  o.require(r.fit.r2 >= 0.98, "R^2 < 0.98");
}

template <class F>
auto phi_integral(F&& f, int n = 64) {
  auto acc = f(0.0);
  acc *= 0.0;
  for (int k = 0; k < n; ++k) acc += f(2.0 * kPi * k / n);
  return (acc * (2.0 * kPi / n)).eval();
}

void geometry(Outcome& o) {
  std::mt19937_64 gen(2718);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> polar(0.0, kPi);
  double err2 = 0.0, err3 = 0.0;
  for (int i = 0; i < 100; ++i) {
    const UnitVec axis = UnitVec::normalized(Vec3(normal(gen), normal(gen), normal(gen)));
    const double theta = polar(gen);
    const Frame f = Frame::adapted(axis);
    const Mat3 m2 = phi_integral([&](double phi) -> Mat3 {
      const Vec3 w = from_spherical({theta, phi}, f).vec();
      return w * w.transpose();
    });
    err2 = std::max(err2, (m2 - phi_moment2(theta, axis)).cwiseAbs().maxCoeff());

    const Vec3& a = axis.vec();
    Mat3 raw;
    for (int k = 0; k < 9; ++k) raw(k / 3, k % 3) = normal(gen);
    const Mat3 grad = raw * (Mat3::Identity() - a * a.transpose());
    const Vec3 m3 = phi_integral([&](double phi) -> Vec3 {
      const Vec3 w = from_spherical({theta, phi}, f).vec();
      return w * w.dot(grad * w);
    });
    err3 = std::max(err3, (m3 - phi_moment3_contracted(theta, axis, grad).full).cwiseAbs().maxCoeff());
  }
  o.detail << "100 random inputs: second moment error " << num(err2) << ", contracted third moment error "
           << num(err3);
  o.require(err2 < 1e-10 && err3 < 1e-10, "closed form differs from quadrature by >= 1e-10");
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "closed-form coefficient oracle", 10, closed_form_coefficients},
      {2, "GCI closed-form limit and maximum principle", 30, gci_limit},
      {3, "independent-discretization agreement", 10, independent_discretization},
      {4, "c1 limit behaviour", 10, limits},
      {5, "eigenvalue special cases", 10, eigenvalue_cases},
      {6, "hydro solver waves", 60, hydro_waves},
      {7, "SDE stationarity", 180, sde_stationarity},
      {8, "order parameter vs c1", 300, order_vs_theory},
      {9, "kernel expansion slope", 10, kernel_expansion},
      {10, "geometry identities", 10, geometry},
  };

  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--only" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--only N]\n", argv[0]);
      return 2;
    }
  }
  if (only < 0 || only > static_cast<int>(criteria.size())) {
    std::fprintf(stderr, "no criterion %d\n", only);
    return 2;
  }

  int failed = 0;
  for (const auto& c : criteria) {
    if (only != 0 && c.id != only) continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(secs <= c.budget_s, "runtime " + num(secs) + " s over the " + num(c.budget_s) + " s budget");
    std::printf("criterion %2d %s  %s (%.1f s): %s\n", c.id, o.pass ? "PASS" : "FAIL", c.title, secs,
                o.detail.str().c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
