#include "cva/nu.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cva {

NuSpec NuSpec::constant(double nu0) {
  NuSpec s;
  s.family_ = Family::constant;
  s.coeffs_ = {nu0};
  return s;
}

NuSpec NuSpec::polynomial(std::vector<double> coefficients) {
  if (coefficients.empty()) throw std::invalid_argument("NuSpec: polynomial needs at least one coefficient");
  NuSpec s;
  s.family_ = Family::polynomial;
  s.coeffs_ = std::move(coefficients);
  return s;
}

NuSpec NuSpec::parse(const std::string& text) {
  auto to_double = [&](const std::string& tok) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != tok.size()) throw std::invalid_argument("NuSpec: cannot parse number '" + tok + "' in '" + text + "'");
    return v;
  };
  const auto colon = text.find(':');
  if (colon == std::string::npos) return constant(to_double(text));
  const std::string kind = text.substr(0, colon);
  const std::string rest = text.substr(colon + 1);
  if (kind == "const" || kind == "constant") return constant(to_double(rest));
  if (kind == "poly" || kind == "polynomial") {
    std::vector<double> c;
    std::stringstream ss(rest);
    std::string tok;
    while (std::getline(ss, tok, ',')) c.push_back(to_double(tok));
    return polynomial(std::move(c));
  }
  throw std::invalid_argument("NuSpec: unknown family '" + kind + "' (expected const or poly)");
}

double NuSpec::operator()(double mu) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * mu + *it;
  return acc;
}

double NuSpec::sigma_unchecked(double mu) const {
  // Term-wise antiderivative: sum_k a_k mu^{k+1} / (k+1).
  double acc = 0.0;
  for (std::size_t k = coeffs_.size(); k-- > 0;) acc = acc * mu + coeffs_[k] / static_cast<double>(k + 1);
  return acc * mu + offset_;
}

double NuSpec::sigma(double mu) const {
  if (!(mu >= -1.0 && mu <= 1.0)) throw std::domain_error("NuSpec::sigma: mu outside [-1, 1]");
  return sigma_unchecked(mu);
}

NuSpec NuSpec::with_sigma_offset(double offset) const {
  NuSpec s = *this;
  s.offset_ = offset;
  return s;
}

double NuSpec::grid_min() const {
  double m = (*this)(-1.0);
  for (int i = 1; i <= 1000; ++i) m = std::min(m, (*this)(-1.0 + 2.0 * i / 1000.0));
  return m;
}

double NuSpec::grid_max() const {
  double m = (*this)(-1.0);
  for (int i = 1; i <= 1000; ++i) m = std::max(m, (*this)(-1.0 + 2.0 * i / 1000.0));
  return m;
}

void NuSpec::require_positive() const {
  if (!(grid_min() > 0.0)) throw std::invalid_argument("nu must be strictly positive on [-1, 1] (got min " + std::to_string(grid_min()) + ")");
}

void NuSpec::require_nonnegative() const {
  if (!(grid_min() >= 0.0)) throw std::invalid_argument("nu must be non-negative on [-1, 1] (got min " + std::to_string(grid_min()) + ")");
}

std::string NuSpec::to_string() const {
  std::ostringstream os;
  os.precision(17);
  if (family_ == Family::constant) {
    os << "const:" << coeffs_.front();
  } else {
    os << "poly:";
    for (std::size_t k = 0; k < coeffs_.size(); ++k) os << (k ? "," : "") << coeffs_[k];
  }
  return os.str();
}

}  // namespace cva
