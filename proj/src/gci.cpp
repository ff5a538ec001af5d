#include "cva/gci.hpp"

#include <algorithm>
#include <cmath>

#include "cva/equilibrium.hpp"
#include "cva/inverse_cdf.hpp"
#include "cva/quadrature.hpp"

namespace cva {

namespace {

constexpr int kCellQuadrature = 8;

struct Weight {
  const NuSpec& nu;
  double d;
  double sigma_ref;
  double operator()(double mu) const { return std::exp((nu.sigma_unchecked(mu) - sigma_ref) / d); }
};

std::vector<double> make_mesh(double layer_width, int n_cells, bool& graded) {
  const double h = 2.0 / n_cells;
  graded = layer_width < 16.0 * h;
  if (graded) return InverseCdfTable::graded_nodes(layer_width, n_cells + 1);
  std::vector<double> mu(n_cells + 1);
  for (int i = 0; i <= n_cells; ++i) mu[i] = -1.0 + i * h;
  mu.back() = 1.0;
  return mu;
}

// Symmetric tridiagonal system stored as diagonal + super-diagonal.
struct Tridiagonal {
  std::vector<double> diag, upper, rhs;

  explicit Tridiagonal(std::size_t n) : diag(n, 0.0), upper(n - 1, 0.0), rhs(n, 0.0) {}

  std::vector<double> apply(const std::vector<double>& x) const {
    const std::size_t n = diag.size();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      double v = diag[i] * x[i];
      if (i > 0) v += upper[i - 1] * x[i - 1];
      if (i + 1 < n) v += upper[i] * x[i + 1];
      y[i] = v;
    }
    return y;
  }

  // Thomas algorithm; the matrix is SPD so no pivoting is needed, but a
  // vanishing pivot is still reported.
  std::vector<double> solve() const {
    const std::size_t n = diag.size();
    std::vector<double> c(n, 0.0), x(rhs);
    // The weight spans many decades for small d, so pivots are judged
    // against their own row.
    double pivot = diag[0];
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0) {
        pivot = diag[i] - upper[i - 1] * c[i - 1];
        x[i] -= upper[i - 1] * x[i - 1];
      }
      if (!(std::abs(pivot) > 1e-14 * std::abs(diag[i]))) throw NumericalError("solve_g: assembled system is singular");
      if (i + 1 < n) c[i] = upper[i] / pivot;
      x[i] /= pivot;
    }
    for (std::size_t i = n - 1; i-- > 0;) x[i] -= c[i] * x[i + 1];
    return x;
  }
};

}  // namespace

double GciSolution::h_at(double mu) const {
  const auto it = std::upper_bound(mu_nodes.begin(), mu_nodes.end(), mu);
  std::size_t k = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(it - mu_nodes.begin(), 1,
                                                                      static_cast<std::ptrdiff_t>(mu_nodes.size()) - 1));
  const double a = mu_nodes[k - 1], b = mu_nodes[k];
  const double t = (mu - a) / (b - a);
  return (1.0 - t) * h_values[k - 1] + t * h_values[k];
}

double GciSolution::g_at(double mu) const { return std::sqrt(std::max(0.0, 1.0 - mu * mu)) * h_at(mu); }

GciSolution solve_g(double d, const NuSpec& nu, int n_cells) {
  if (!(d > 0.0) || !std::isfinite(d)) throw std::invalid_argument("solve_g: d must be > 0");
  if (n_cells < 32) throw std::invalid_argument("solve_g: n_cells must be >= 32");
  nu.require_positive();

  GciSolution sol;
  sol.d = d;
  sol.nu = nu;
  sol.n_cells = n_cells;
  sol.mu_nodes = make_mesh(d / nu(1.0), n_cells, sol.graded_mesh);

  const Weight w{nu, d, nu.sigma_unchecked(1.0)};
  const QuadratureRule ref = gauss_rule(kCellQuadrature);
  Tridiagonal sys(sol.mu_nodes.size());

  for (int c = 0; c < n_cells; ++c) {
    const double a = sol.mu_nodes[c], b = sol.mu_nodes[c + 1];
    const double len = b - a, half = 0.5 * len, mid = 0.5 * (a + b);
    double k00 = 0.0, k01 = 0.0, k11 = 0.0, f0 = 0.0, f1 = 0.0;
    for (std::size_t q = 0; q < ref.size(); ++q) {
      const double mu = mid + half * ref.nodes[q];
      // For d below ~2e-3 the weight underflows over most of [-1, 1] and would
      // leave empty rows. Flooring it there swaps in the unweighted operator,
      // which is coercive; those nodes enter every coefficient with weight
      // < 1e-250, so the results do not change.
      const double wq = half * ref.weights[q] * std::max(w(mu), 1e-250);
      const double s2 = 1.0 - mu * mu;
      const double p0 = (b - mu) / len, p1 = (mu - a) / len;
      // (s^2 phi' - mu phi) for both hat functions
      const double t0 = -s2 / len - mu * p0;
      const double t1 = s2 / len - mu * p1;
      k00 += wq * (t0 * t0 + p0 * p0);
      k01 += wq * (t0 * t1 + p0 * p1);
      k11 += wq * (t1 * t1 + p1 * p1);
      f0 -= wq * s2 * p0;
      f1 -= wq * s2 * p1;
    }
    sys.diag[c] += k00;
    sys.diag[c + 1] += k11;
    sys.upper[c] += k01;
    sys.rhs[c] += f0;
    sys.rhs[c + 1] += f1;
  }

  sol.h_values = sys.solve();
  for (double v : sol.h_values)
    if (!std::isfinite(v)) throw NumericalError("solve_g: non-finite solution");

  const std::vector<double> ah = sys.apply(sol.h_values);
  double rmax = 0.0, fmax = 0.0;
  for (std::size_t i = 0; i < ah.size(); ++i) {
    rmax = std::max(rmax, std::abs(ah[i] - sys.rhs[i]));
    fmax = std::max(fmax, std::abs(sys.rhs[i]));
  }
  sol.residual_norm = fmax > 0.0 ? rmax / fmax : rmax;
  if (sol.residual_norm > kGciResidualTolerance)
    throw NumericalError("solve_g: residual " + std::to_string(sol.residual_norm) + " exceeds tolerance");

  sol.g_values.resize(sol.mu_nodes.size());
  for (std::size_t i = 0; i < sol.mu_nodes.size(); ++i) {
    const double mu = sol.mu_nodes[i];
    sol.g_values[i] = std::sqrt(std::max(0.0, 1.0 - mu * mu)) * sol.h_values[i];
  }
  return sol;
}

GciSolution h_from_g(GciSolution sol) {
  for (std::size_t i = 1; i + 1 < sol.mu_nodes.size(); ++i) {
    const double mu = sol.mu_nodes[i];
    sol.h_values[i] = sol.g_values[i] / std::sqrt(1.0 - mu * mu);
  }
  return sol;
}

double strong_residual(const GciSolution& sol, double mu_cut) {
  const Weight w{sol.nu, sol.d, sol.nu.sigma_unchecked(1.0)};
  const auto& x = sol.mu_nodes;
  const auto& g = sol.g_values;
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < x.size(); ++i) {
    if (std::abs(x[i]) > mu_cut) continue;
    const double hl = x[i] - x[i - 1], hr = x[i + 1] - x[i];
    const double ml = 0.5 * (x[i] + x[i - 1]), mr = 0.5 * (x[i] + x[i + 1]);
    const double fl = w(ml) * (1.0 - ml * ml) * (g[i] - g[i - 1]) / hl;
    const double fr = w(mr) * (1.0 - mr * mr) * (g[i + 1] - g[i]) / hr;
    const double s2 = 1.0 - x[i] * x[i];
    const double wi = w(x[i]);
    const double lhs = -(fr - fl) / (0.5 * (hl + hr)) + wi * g[i] / s2;
    const double r = (lhs + std::sqrt(s2) * wi) / wi;
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

void HydroCoefficients::validate() const {
  if (!(c1 > 0.0 && c1 < 1.0)) throw NumericalError("coefficients: c1 outside (0, 1)");
  if (!(lambda > 0.0)) throw NumericalError("coefficients: lambda must be > 0");
}

HydroCoefficients coefficients(const GciSolution& sol) {
  const Weight w{sol.nu, sol.d, sol.nu.sigma_unchecked(1.0)};
  const QuadratureRule ref = gauss_rule(kCellQuadrature);
  double num_c2 = 0.0, num_lambda = 0.0, den = 0.0;
  for (std::size_t c = 0; c + 1 < sol.mu_nodes.size(); ++c) {
    const double a = sol.mu_nodes[c], b = sol.mu_nodes[c + 1];
    const double len = b - a, half = 0.5 * len, mid = 0.5 * (a + b);
    for (std::size_t q = 0; q < ref.size(); ++q) {
      const double mu = mid + half * ref.nodes[q];
      const double t = (mu - a) / len;
      const double h = (1.0 - t) * sol.h_values[c] + t * sol.h_values[c + 1];
      const double base = half * ref.weights[q] * w(mu) * (1.0 - mu * mu) * h;
      const double nu = sol.nu(mu);
      num_c2 += base * mu * nu;
      num_lambda += base;
      den += base * nu;
    }
  }
  if (std::abs(den) < 1e-14) throw NumericalError("coefficients: degenerate denominator int (1-mu^2) nu h M");

  HydroCoefficients out;
  out.d = sol.d;
  out.c1 = c1(normalize(sol.d, sol.nu));
  out.c2 = num_c2 / den;
  out.lambda = sol.d * num_lambda / den;
  out.c = out.c2 / out.c1;
  out.lambda_rescaled = out.lambda / out.c1;
  out.residual_norm = sol.residual_norm;
  out.n_cells = sol.n_cells;
  return out;
}

HydroCoefficients coefficients(double d, const NuSpec& nu, int n_cells) { return coefficients(solve_g(d, nu, n_cells)); }

}  // namespace cva
