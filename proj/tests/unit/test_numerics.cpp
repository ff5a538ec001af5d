#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <numbers>

#include "cva/inverse_cdf.hpp"
#include "cva/nu.hpp"
#include "cva/quadrature.hpp"
#include "cva/rng.hpp"

using namespace cva;

TEST_SUITE("numerics") {

TEST_CASE("Gauss-Legendre integrates polynomials of degree 2n-1 exactly") {
  for (int n : {2, 5, 16, 40}) {
    const auto rule = gauss_rule(n);
    CHECK(rule.size() == static_cast<std::size_t>(n));
    const int p = 2 * n - 1;
    // int_{-1}^{1} mu^(p-1) = 2/p for even p-1
    CHECK(rule.integrate([&](double x) { return std::pow(x, p - 1); }) == doctest::Approx(2.0 / p).epsilon(1e-13));
    CHECK(std::abs(rule.integrate([&](double x) { return std::pow(x, p); })) < 1e-14);
  }
  CHECK_THROWS_AS(gauss_rule(1), std::invalid_argument);
}

TEST_CASE("graded rule resolves a thin exponential layer") {
  for (double d : {1e-4, 1e-2, 1.0}) {
    const auto rule = graded_rule(d);
    const double exact = d * (-std::expm1(-2.0 / d));  // int e^{(mu-1)/d}
    CHECK(rule.integrate([&](double m) { return std::exp((m - 1.0) / d); }) == doctest::Approx(exact).epsilon(1e-13));
  }
}

TEST_CASE("Philox4x32-10 known-answer vectors") {
  const auto zero = philox4x32({0, 0, 0, 0}, {0, 0});
  CHECK(zero[0] == 0x6627e8d5u);
  CHECK(zero[1] == 0xe169c58du);
  CHECK(zero[2] == 0xbc57ac4cu);
  CHECK(zero[3] == 0x9b00dbd8u);
  const auto ones = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  CHECK(ones[0] == 0x408f276du);
  CHECK(ones[1] == 0x41c83b0eu);
  CHECK(ones[2] == 0xa20bc7c6u);
  CHECK(ones[3] == 0x6d5451fdu);
}

TEST_CASE("counter streams are reproducible and independent of draw order") {
  CounterRng a(42, 7, 3), b(42, 7, 3), c(42, 8, 3);
  for (int i = 0; i < 10; ++i) {
    const auto x = a();
    CHECK(x == b());
    CHECK(x != c());
  }
}

TEST_CASE("uniforms and normals have the right moments") {
  CounterRng rng(1, 0);
  double s = 0.0, s2 = 0.0, g = 0.0, g2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = uniform01(rng);
    CHECK_UNARY(u >= 0.0);
    CHECK_UNARY(u < 1.0);
    s += u;
    s2 += u * u;
    const auto z = gaussian_pair(rng);
    g += z[0] + z[1];
    g2 += z[0] * z[0] + z[1] * z[1];
  }
  CHECK(s / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(s2 / n == doctest::Approx(1.0 / 3.0).epsilon(0.01));
  CHECK(std::abs(g / (2 * n)) < 0.01);
  CHECK(g2 / (2 * n) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("inverse CDF table inverts the distribution") {
  const double d = 0.05;
  const auto table = InverseCdfTable::from_density([&](double m) { return std::exp((m - 1.0) / d); }, d);
  auto cdf = [&](double m) { return (std::exp((m - 1.0) / d) - std::exp(-2.0 / d)) / (1.0 - std::exp(-2.0 / d)); };
  for (double u : {0.01, 0.1, 0.5, 0.9, 0.999}) CHECK(cdf(table.quantile(u)) == doctest::Approx(u).epsilon(1e-6));
  const auto& nodes = table.nodes();
  for (std::size_t i = 1; i < nodes.size(); ++i) CHECK_UNARY(nodes[i] > nodes[i - 1]);
}

TEST_CASE("nu spec parsing and antiderivative") {
  const auto c = NuSpec::parse("const:2.5");
  CHECK(c(0.3) == 2.5);
  CHECK(c.sigma(0.4) == doctest::Approx(1.0));
  CHECK(NuSpec::parse("1")(0.9) == 1.0);
  const auto p = NuSpec::parse("poly:1,0,0.5");
  CHECK(p(0.5) == doctest::Approx(1.125));
  CHECK(p.sigma(1.0) == doctest::Approx(1.0 + 0.5 / 3.0));
  CHECK(p.sigma(0.0) == 0.0);
  CHECK_THROWS_AS(p.sigma(1.5), std::domain_error);
  CHECK_THROWS_AS(NuSpec::parse("poly:1,x"), std::invalid_argument);
  CHECK_THROWS_AS(NuSpec::parse("exp:1"), std::invalid_argument);
  CHECK_THROWS_AS(NuSpec::parse("poly:0,1").require_positive(), std::invalid_argument);
}

}
