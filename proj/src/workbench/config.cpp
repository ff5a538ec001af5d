#include "cva/workbench/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "cva/gci.hpp"
#include "cva/hydro.hpp"

namespace cva::wb {

const std::vector<FieldDoc>& config_fields() {
  static const std::vector<FieldDoc> fields = {
      {"coefficients", "d_list", "0.1,0.2,0.5,1,2,5,10", "diffusion values d (comma list, > 0)"},
      {"coefficients", "nu", "1", "interaction frequency: 1 | const:x | poly:a0,a1,..."},
      {"coefficients", "n_cells", "512", "finite-element cells on [-1, 1] (>= 32)"},

      {"relaxation", "n", "100000", "particles"},
      {"relaxation", "d", "1", "diffusion d (> 0)"},
      {"relaxation", "nu", "1", "interaction frequency"},
      {"relaxation", "dt", "0.01", "Euler-Maruyama step"},
      {"relaxation", "t_end", "20", "final time"},
      {"relaxation", "burn_in", "10", "histogram accumulated after this time"},
      {"relaxation", "sample_every", "0.5", "diagnostic sampling interval"},
      {"relaxation", "hist_bins", "40", "histogram bins in cos(theta)"},
      {"relaxation", "legendre_degree", "8", "degree of the density estimate behind H"},
      {"relaxation", "h_grid", "128", "theta points for H (>= 64)"},
      {"relaxation", "autocorrelation", "false", "also run the pure-diffusion autocorrelation check"},
      {"relaxation", "autocorr_n", "100000", "particles for the autocorrelation check"},
      {"relaxation", "autocorr_d", "0.5", "diffusion for the autocorrelation check"},
      {"relaxation", "autocorr_dt", "0.001", "step for the autocorrelation check"},
      {"relaxation", "autocorr_t_end", "1", "horizon for the autocorrelation check"},

      {"order", "n", "100000", "particles"},
      {"order", "d_list", "0.2,0.5,1,2", "diffusion values"},
      {"order", "nu", "1", "interaction frequency"},
      {"order", "kernel", "ball", "observation kernel: ball | bump"},
      {"order", "radius", "1", "kernel radius R"},
      {"order", "particles_per_ball", "200", "mean particles per kernel ball (sets the box)"},
      {"order", "dt", "0.1", "time step"},
      {"order", "burn_in", "3", "time discarded before measuring"},
      {"order", "measure", "3", "measurement window"},
      {"order", "sample_every", "0.5", "sampling interval"},
      {"order", "integrator", "split", "split | continuous"},

      {"kernel_expansion", "eps_list", "0.4,0.2,0.1,0.05", "kernel scales epsilon"},
      {"kernel_expansion", "field", "smooth", "smooth | constant direction field"},
      {"kernel_expansion", "kernel", "ball", "ball | bump"},
      {"kernel_expansion", "field_scale", "1", "length scale of the synthetic field"},
      {"kernel_expansion", "n_radial", "24", "radial Gauss nodes"},
      {"kernel_expansion", "n_polar", "24", "polar Gauss nodes"},
      {"kernel_expansion", "n_azimuth", "48", "azimuthal trapezoid nodes"},

      {"wave_speed", "theta_list", "0,1.0471975511965976,1.5707963267948966", "base angles theta0 in [0, pi]"},
      {"wave_speed", "source", "explicit", "explicit (c, lambda) | solve (from d, nu)"},
      {"wave_speed", "c", "1", "rescaled c (explicit)"},
      {"wave_speed", "lambda", "1", "rescaled lambda (explicit, >= 0)"},
      {"wave_speed", "d", "1", "diffusion for source = solve"},
      {"wave_speed", "nu", "1", "interaction frequency for source = solve"},
      {"wave_speed", "n_cells", "512", "GCI cells for source = solve"},
      {"wave_speed", "n_z", "512", "grid cells"},
      {"wave_speed", "cfl", "0.5", "CFL number (<= 0.9)"},
      {"wave_speed", "amplitude", "1e-4", "perturbation amplitude (relative)"},
      {"wave_speed", "rho0", "1", "base density"},
      {"wave_speed", "phi0", "1", "base azimuth"},

      {"particles", "n", "10000", "particles"},
      {"particles", "box", "10", "periodic box side L"},
      {"particles", "kernel", "ball", "ball | bump"},
      {"particles", "radius", "1", "kernel radius R"},
      {"particles", "nu", "1", "interaction frequency (>= 0)"},
      {"particles", "d", "0.5", "diffusion d (>= 0)"},
      {"particles", "epsilon", "1", "scale ratio (> 0)"},
      {"particles", "dt", "0.05", "time step"},
      {"particles", "steps", "100", "number of steps"},
      {"particles", "integrator", "continuous", "discrete | continuous | split"},
      {"particles", "init", "isotropic", "isotropic | aligned | equilibrium"},
      {"particles", "init_axis", "0,0,1", "axis for aligned / equilibrium starts"},
      {"particles", "output_every", "10", "steps between outputs"},
      {"particles", "bins", "4,4,4", "moment bins nx,ny,nz"},
      {"particles", "resume", "", "checkpoint to resume from (empty: fresh start)"},
      {"particles", "checkpoint", "true", "write a final binary checkpoint"},
      {"particles", "particles_csv", "false", "also dump every particle at each output"},

      {"hydro", "n_z", "400", "grid cells"},
      {"hydro", "length", "1", "periodic domain length"},
      {"hydro", "cfl", "0.5", "CFL number (<= 0.9)"},
      {"hydro", "t_end", "0.5", "final time"},
      {"hydro", "output_every", "0.1", "snapshot interval"},
      {"hydro", "initial", "sine", "sine | gaussian"},
      {"hydro", "rho0", "1", "base density (> 0)"},
      {"hydro", "theta0", "1", "base polar angle"},
      {"hydro", "phi0", "1", "base azimuth"},
      {"hydro", "amp_rho", "0.01", "density perturbation"},
      {"hydro", "amp_theta", "0.01", "theta perturbation"},
      {"hydro", "amp_phi", "0", "phi perturbation"},
      {"hydro", "width", "0.05", "gaussian width as a fraction of the length"},
      {"hydro", "source", "explicit", "explicit (c, lambda) | solve (from d, nu)"},
      {"hydro", "c", "1", "rescaled c (explicit)"},
      {"hydro", "lambda", "1", "rescaled lambda (explicit)"},
      {"hydro", "d", "1", "diffusion for source = solve"},
      {"hydro", "nu", "1", "interaction frequency for source = solve"},
      {"hydro", "n_cells", "512", "GCI cells for source = solve"},
  };
  return fields;
}

namespace {

const FieldDoc* find_field(const std::string& section, const std::string& key) {
  for (const auto& f : config_fields())
    if (f.section == section && f.key == key) return &f;
  return nullptr;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& field, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v))
    throw ConfigError(field, "expected a finite number, got '" + text + "'");
  return v;
}

}  // namespace

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

Config Config::from_string(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("config", std::string("cannot parse: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  Config c;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError(section, "key outside of any [section]");
    for (const auto& [key, value] : body) {
      if (!find_field(section, key)) throw ConfigError(section + "." + key, "unknown configuration key");
      c.values_[section + "." + key] = trim(value.data());
    }
  }
  return c;
}

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return from_string(buf.str());
}

std::string Config::get(const std::string& section, const std::string& key) const {
  const FieldDoc* f = find_field(section, key);
  if (!f) throw ConfigError(section + "." + key, "unknown configuration key");
  const auto it = values_.find(section + "." + key);
  return it != values_.end() ? it->second : f->default_value;
}

double Config::get_double(const std::string& section, const std::string& key) const {
  return parse_double(section + "." + key, get(section, key));
}

long long Config::get_int(const std::string& section, const std::string& key) const {
  const std::string field = section + "." + key;
  const std::string t = trim(get(section, key));
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
    throw ConfigError(field, "expected an integer, got '" + t + "'");
  return v;
}

bool Config::get_bool(const std::string& section, const std::string& key) const {
  const std::string t = trim(get(section, key));
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError(section + "." + key, "expected true or false, got '" + t + "'");
}

std::vector<double> Config::get_list(const std::string& section, const std::string& key) const {
  const std::string field = section + "." + key;
  std::vector<double> out;
  std::stringstream ss(get(section, key));
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(field, item));
  if (out.empty()) throw ConfigError(field, "expected a non-empty comma-separated list");
  return out;
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
  if (!find_field(section, key)) throw ConfigError(section + "." + key, "unknown configuration key");
  values_[section + "." + key] = value;
}

std::string Config::canonical(const std::vector<std::string>& sections) const {
  std::vector<std::string> lines;
  for (const auto& f : config_fields())
    if (std::find(sections.begin(), sections.end(), f.section) != sections.end())
      lines.push_back(f.section + "." + f.key + " = " + get(f.section, f.key));
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

std::uint64_t Config::hash(const std::vector<std::string>& sections) const { return fnv1a64(canonical(sections)); }

namespace {

// Field-path validation helpers.
double positive(const Config& c, const std::string& s, const std::string& k) {
  const double v = c.get_double(s, k);
  if (!(v > 0.0)) throw ConfigError(s + "." + k, "must be > 0 (got " + c.get(s, k) + ")");
  return v;
}

double non_negative(const Config& c, const std::string& s, const std::string& k) {
  const double v = c.get_double(s, k);
  if (!(v >= 0.0)) throw ConfigError(s + "." + k, "must be >= 0 (got " + c.get(s, k) + ")");
  return v;
}

long long at_least(const Config& c, const std::string& s, const std::string& k, long long lo) {
  const long long v = c.get_int(s, k);
  if (v < lo) throw ConfigError(s + "." + k, "must be >= " + std::to_string(lo) + " (got " + c.get(s, k) + ")");
  return v;
}

std::string one_of(const Config& c, const std::string& s, const std::string& k, const std::vector<std::string>& options) {
  const std::string v = c.get(s, k);
  if (std::find(options.begin(), options.end(), v) == options.end()) {
    std::string list;
    for (const auto& o : options) list += (list.empty() ? "" : " | ") + o;
    throw ConfigError(s + "." + k, "must be one of " + list + " (got '" + v + "')");
  }
  return v;
}

NuSpec nu_field(const Config& c, const std::string& s, bool strictly_positive) {
  try {
    NuSpec nu = NuSpec::parse(c.get(s, "nu"));
    if (strictly_positive)
      nu.require_positive();
    else
      nu.require_nonnegative();
    return nu;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(s + ".nu", e.what());
  }
}

std::vector<double> positive_list(const Config& c, const std::string& s, const std::string& k) {
  auto v = c.get_list(s, k);
  for (double x : v)
    if (!(x > 0.0)) throw ConfigError(s + "." + k, "every entry must be > 0");
  return v;
}

KernelSpec kernel_field(const Config& c, const std::string& s) {
  KernelSpec k;
  k.shape = one_of(c, s, "kernel", {"ball", "bump"}) == "ball" ? KernelSpec::Shape::ball : KernelSpec::Shape::bump;
  k.radius = positive(c, s, "radius");
  return k;
}

CoefficientSource source_field(const Config& c, const std::string& s) {
  CoefficientSource src;
  src.kind = one_of(c, s, "source", {"explicit", "solve"});
  if (src.kind == "explicit") {
    src.c = c.get_double(s, "c");
    src.lambda = non_negative(c, s, "lambda");
  } else {
    src.d = positive(c, s, "d");
    src.nu = nu_field(c, s, true);
    src.n_cells = static_cast<int>(at_least(c, s, "n_cells", 32));
  }
  return src;
}

}  // namespace

CoefficientsConfig load_coefficients(const Config& c) {
  CoefficientsConfig out;
  out.d_list = positive_list(c, "coefficients", "d_list");
  std::sort(out.d_list.begin(), out.d_list.end());
  out.d_list.erase(std::unique(out.d_list.begin(), out.d_list.end()), out.d_list.end());
  out.nu = nu_field(c, "coefficients", true);
  out.n_cells = static_cast<int>(at_least(c, "coefficients", "n_cells", 32));
  return out;
}

RelaxationConfig load_relaxation(const Config& c) {
  const std::string s = "relaxation";
  RelaxationConfig out;
  auto& r = out.relaxation;
  r.n = static_cast<std::size_t>(at_least(c, s, "n", 1));
  r.d = positive(c, s, "d");
  r.nu = nu_field(c, s, true);
  r.dt = positive(c, s, "dt");
  r.t_end = positive(c, s, "t_end");
  r.burn_in = non_negative(c, s, "burn_in");
  if (r.burn_in >= r.t_end) throw ConfigError(s + ".burn_in", "must be < relaxation.t_end");
  r.sample_every = positive(c, s, "sample_every");
  if (r.sample_every < r.dt) throw ConfigError(s + ".sample_every", "must be >= relaxation.dt");
  r.hist_bins = static_cast<int>(at_least(c, s, "hist_bins", 2));
  r.legendre_degree = static_cast<int>(at_least(c, s, "legendre_degree", 1));
  r.h_grid = static_cast<int>(at_least(c, s, "h_grid", 64));
  out.autocorrelation = c.get_bool(s, "autocorrelation");
  out.autocorr.n = static_cast<std::size_t>(at_least(c, s, "autocorr_n", 2));
  out.autocorr.d = positive(c, s, "autocorr_d");
  out.autocorr.dt = positive(c, s, "autocorr_dt");
  out.autocorr.t_end = positive(c, s, "autocorr_t_end");
  return out;
}

OrderSweepParams load_order(const Config& c) {
  const std::string s = "order";
  OrderSweepParams p;
  p.n = static_cast<std::size_t>(at_least(c, s, "n", 2));
  p.d_list = positive_list(c, s, "d_list");
  p.nu = nu_field(c, s, true);
  p.kernel = kernel_field(c, s);
  p.particles_per_ball = positive(c, s, "particles_per_ball");
  p.dt = positive(c, s, "dt");
  p.burn_in = non_negative(c, s, "burn_in");
  p.measure = positive(c, s, "measure");
  p.sample_every = positive(c, s, "sample_every");
  if (p.sample_every > p.measure) throw ConfigError(s + ".sample_every", "must be <= order.measure");
  p.integrator = one_of(c, s, "integrator", {"split", "continuous"});
  return p;
}

KernelExpansionParams load_kernel_expansion(const Config& c) {
  const std::string s = "kernel_expansion";
  KernelExpansionParams p;
  p.eps_list = positive_list(c, s, "eps_list");
  if (p.eps_list.size() < 2) throw ConfigError(s + ".eps_list", "needs at least two scales");
  p.field = one_of(c, s, "field", {"smooth", "constant"});
  p.shape = one_of(c, s, "kernel", {"ball", "bump"}) == "ball" ? KernelSpec::Shape::ball : KernelSpec::Shape::bump;
  p.field_scale = positive(c, s, "field_scale");
  p.n_radial = static_cast<int>(at_least(c, s, "n_radial", 2));
  p.n_polar = static_cast<int>(at_least(c, s, "n_polar", 2));
  p.n_azimuth = static_cast<int>(at_least(c, s, "n_azimuth", 3));
  return p;
}

WaveSpeedConfig load_wave_speed(const Config& c) {
  const std::string s = "wave_speed";
  WaveSpeedConfig out;
  out.theta_list = c.get_list(s, "theta_list");
  for (double t : out.theta_list)
    if (!(t >= 0.0 && t <= std::numbers::pi)) throw ConfigError(s + ".theta_list", "angles must lie in [0, pi]");
  out.coeffs = source_field(c, s);
  out.base.n_z = static_cast<int>(at_least(c, s, "n_z", 16));
  out.base.cfl = positive(c, s, "cfl");
  if (out.base.cfl > 0.9) throw ConfigError(s + ".cfl", "must be <= 0.9");
  out.base.amplitude = positive(c, s, "amplitude");
  out.base.rho0 = positive(c, s, "rho0");
  out.base.phi0 = c.get_double(s, "phi0");
  if (!(out.base.phi0 >= 0.0 && out.base.phi0 < 2.0 * std::numbers::pi))
    throw ConfigError(s + ".phi0", "must lie in [0, 2 pi)");
  return out;
}

SimulateConfig load_simulate(const Config& c) {
  const std::string s = "particles";
  SimulateConfig out;
  out.n = static_cast<std::size_t>(at_least(c, s, "n", 1));
  out.box = positive(c, s, "box");
  out.model.kernel = kernel_field(c, s);
  out.model.nu = nu_field(c, s, false);
  out.model.d = non_negative(c, s, "d");
  out.model.epsilon = positive(c, s, "epsilon");
  out.dt = positive(c, s, "dt");
  out.steps = at_least(c, s, "steps", 0);
  out.integrator = one_of(c, s, "integrator", {"discrete", "continuous", "split"});
  if (out.integrator == "discrete" && out.model.nu.grid_max() * out.dt > 1.0)
    throw ConfigError(s + ".dt", "discrete rule requires max(nu) * dt <= 1");
  const std::string init = one_of(c, s, "init", {"isotropic", "aligned", "equilibrium"});
  out.init.kind = init == "isotropic"   ? InitialOrientation::Kind::isotropic
                  : init == "aligned"   ? InitialOrientation::Kind::aligned
                                        : InitialOrientation::Kind::equilibrium;
  const auto axis = c.get_list(s, "init_axis");
  if (axis.size() != 3) throw ConfigError(s + ".init_axis", "expected three components");
  try {
    out.init.axis = UnitVec::normalized(Vec3(axis[0], axis[1], axis[2]));
  } catch (const std::invalid_argument&) {
    throw ConfigError(s + ".init_axis", "must be a non-zero vector");
  }
  out.init.d = out.model.d;
  out.init.nu = out.model.nu;
  if (out.init.kind == InitialOrientation::Kind::equilibrium) {
    if (!(out.model.d > 0.0)) throw ConfigError(s + ".d", "equilibrium start needs d > 0");
    try {
      out.model.nu.require_positive();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(s + ".nu", std::string("equilibrium start: ") + e.what());
    }
  }
  out.output_every = at_least(c, s, "output_every", 1);
  const auto bins = c.get_list(s, "bins");
  if (bins.size() != 3) throw ConfigError(s + ".bins", "expected nx,ny,nz");
  for (double b : bins)
    if (!(b >= 1.0 && b == std::floor(b))) throw ConfigError(s + ".bins", "bin counts must be positive integers");
  out.bins = BinSpec{static_cast<int>(bins[0]), static_cast<int>(bins[1]), static_cast<int>(bins[2])};
  out.resume = c.get(s, "resume");
  out.checkpoint = c.get_bool(s, "checkpoint");
  out.particles_csv = c.get_bool(s, "particles_csv");
  return out;
}

HydroRunConfig load_hydro(const Config& c) {
  const std::string s = "hydro";
  HydroRunConfig out;
  out.n_z = static_cast<int>(at_least(c, s, "n_z", 8));
  out.length = positive(c, s, "length");
  out.cfl = positive(c, s, "cfl");
  if (out.cfl > 0.9) throw ConfigError(s + ".cfl", "must be <= 0.9");
  out.t_end = positive(c, s, "t_end");
  out.output_every = positive(c, s, "output_every");
  out.initial = one_of(c, s, "initial", {"sine", "gaussian"});
  out.rho0 = positive(c, s, "rho0");
  out.theta0 = c.get_double(s, "theta0");
  out.phi0 = c.get_double(s, "phi0");
  out.amp_rho = c.get_double(s, "amp_rho");
  out.amp_theta = c.get_double(s, "amp_theta");
  out.amp_phi = c.get_double(s, "amp_phi");
  out.width = positive(c, s, "width");
  if (std::abs(out.amp_rho) >= out.rho0) throw ConfigError(s + ".amp_rho", "must be smaller than hydro.rho0 so rho stays > 0");
  if (out.theta0 - std::abs(out.amp_theta) < 0.0 || out.theta0 + std::abs(out.amp_theta) > std::numbers::pi)
    throw ConfigError(s + ".theta0", "theta0 +- amp_theta must stay inside [0, pi]");
  out.coeffs = source_field(c, s);
  return out;
}

RescaledCoefficients resolve(const CoefficientSource& src) {
  if (src.kind == "explicit") return {src.c, src.lambda};
  return rescale(coefficients(src.d, src.nu, src.n_cells));
}

}  // namespace cva::wb
