#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "cva/nu.hpp"
#include "cva/particles.hpp"
#include "cva/workbench/experiments.hpp"

namespace cva::wb {

/// Validation failure tied to a configuration field ("section.key").
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct FieldDoc {
  std::string section;
  std::string key;
  std::string default_value;
  std::string doc;
};

/// Every accepted key with its default; also the source of `--help`.
const std::vector<FieldDoc>& config_fields();

/// Flat INI-style key-value file: `[section]` headers, `key = value` lines,
/// `;` or `#` comments. Unknown sections or keys are rejected.
class Config {
 public:
  Config() = default;
  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text);

  /// Explicit value, else the documented default. Throws ConfigError for an
  /// unregistered key.
  std::string get(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key) const;
  long long get_int(const std::string& section, const std::string& key) const;
  bool get_bool(const std::string& section, const std::string& key) const;
  std::vector<double> get_list(const std::string& section, const std::string& key) const;
  void set(const std::string& section, const std::string& key, const std::string& value);

  /// Resolved "section.key = value" lines (defaults included), sorted, for the
  /// given sections. Hashing this makes the hash independent of formatting.
  std::string canonical(const std::vector<std::string>& sections) const;
  std::uint64_t hash(const std::vector<std::string>& sections) const;

 private:
  std::map<std::string, std::string> values_;  // "section.key" -> raw text
};

std::uint64_t fnv1a64(const std::string& bytes);

// Typed, validated views per command. All checks run at load time.

struct CoefficientsConfig {
  std::vector<double> d_list;  // sorted, unique
  NuSpec nu;
  int n_cells = 512;
};
CoefficientsConfig load_coefficients(const Config& c);

struct RelaxationConfig {
  RelaxationParams relaxation;
  bool autocorrelation = false;
  AutocorrelationParams autocorr;
};
RelaxationConfig load_relaxation(const Config& c);

OrderSweepParams load_order(const Config& c);
KernelExpansionParams load_kernel_expansion(const Config& c);

struct CoefficientSource {
  std::string kind = "explicit";  // explicit | solve
  double c = 1.0, lambda = 1.0;   // rescaled pair (explicit)
  double d = 1.0;                 // solve: gci at this d
  NuSpec nu;
  int n_cells = 512;
};

struct WaveSpeedConfig {
  std::vector<double> theta_list;
  CoefficientSource coeffs;
  WaveSpeedParams base;  // c, lambda, theta0 filled per run
};
WaveSpeedConfig load_wave_speed(const Config& c);

struct SimulateConfig {
  std::size_t n = 10000;
  double box = 10.0;
  ModelParams model;
  double dt = 0.05;
  long long steps = 100;
  std::string integrator = "continuous";  // discrete | continuous | split
  InitialOrientation init;
  long long output_every = 10;
  BinSpec bins;
  std::string resume;  // checkpoint path, empty for a fresh start
  bool checkpoint = true;
  bool particles_csv = false;
};
SimulateConfig load_simulate(const Config& c);

struct HydroRunConfig {
  int n_z = 400;
  double length = 1.0;
  double cfl = 0.5;
  double t_end = 0.5;
  double output_every = 0.1;
  std::string initial = "sine";  // sine | gaussian
  double rho0 = 1.0, theta0 = 1.0, phi0 = 1.0;
  double amp_rho = 0.01, amp_theta = 0.01, amp_phi = 0.0;
  double width = 0.05;  // gaussian width (fraction of length)
  CoefficientSource coeffs;
};
HydroRunConfig load_hydro(const Config& c);

/// Rescaled (c, lambda) from an explicit pair or a GCI solve.
RescaledCoefficients resolve(const CoefficientSource& src);

}  // namespace cva::wb
