#include "cva/workbench/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "cva/gci.hpp"
#include "cva/hydro.hpp"
#include "cva/particle_io.hpp"
#include "cva/particles.hpp"
#include "cva/workbench/experiments.hpp"
#include "cva/workbench/output.hpp"

namespace cva::wb {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"coefficients", "relaxation", "order-vs-c1", "kernel-expansion",
                                                 "wave-speed",   "simulate",   "hydro-run"};
  return names;
}

std::vector<std::string> command_sections(const std::string& command) {
  if (command == "coefficients") return {"coefficients"};
  if (command == "relaxation") return {"relaxation"};
  if (command == "order-vs-c1") return {"order"};
  if (command == "kernel-expansion") return {"kernel_expansion"};
  if (command == "wave-speed") return {"wave_speed"};
  if (command == "simulate") return {"particles"};
  if (command == "hydro-run") return {"hydro"};
  throw std::invalid_argument("unknown command '" + command + "'");
}

std::string config_help() {
  std::ostringstream out;
  out << "Configuration file (INI style, every key optional). Defaults:\n";
  std::string section;
  for (const auto& f : config_fields()) {
    if (f.section != section) {
      section = f.section;
      out << "\n  [" << section << "]\n";
    }
    std::string lhs = f.key + " = " + f.default_value;
    if (lhs.size() < 40) lhs.resize(40, ' ');
    out << "    " << lhs << " ; " << f.doc << "\n";
  }
  return out.str();
}

namespace {

struct Context {
  std::string command;
  const GlobalOptions& opts;
  Provenance prov;
  fs::path dir;
  std::vector<std::string> failures;  // --check failures

  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  int finish(int code) const {
    if (!opts.check) return code;
    for (const auto& f : failures) std::cerr << "check failed: " << f << "\n";
    if (!failures.empty()) return kCheckFailed;
    std::cerr << "check passed: " << command << "\n";
    return code;
  }
  void note(const fs::path& p) const { std::cout << "wrote " << p.string() << "\n"; }
};

// ---------------------------------------------------------------------------

int cmd_coefficients(const Config& config, Context& ctx) {
  const auto cfg = load_coefficients(config);
  const std::size_t n = cfg.d_list.size();
  std::vector<HydroCoefficients> rows(n);
  std::vector<std::string> status(n, "ok");

  // Each d is an independent solve; rows land in their own slot so the order
  // (and the bytes written) do not depend on scheduling.
#pragma omp parallel for schedule(dynamic, 1) num_threads(num_threads())
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(n); ++k) {
    try {
      rows[k] = coefficients(cfg.d_list[k], cfg.nu, cfg.n_cells);
      rows[k].validate();
    } catch (const std::exception& e) {
      rows[k].d = cfg.d_list[k];
      rows[k].n_cells = cfg.n_cells;
      status[k] = std::string("failed: ") + e.what();
    }
  }

  Table t{{"d", "c1", "c2", "lambda", "c", "lambda_rescaled", "residual_norm", "n_cells", "status"}, {}};
  int code = kOk;
  const bool unit_nu = cfg.nu.grid_min() == 1.0 && cfg.nu.grid_max() == 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& r = rows[k];
    t.add({r.d, r.c1, r.c2, r.lambda, r.c, r.lambda_rescaled, r.residual_norm, static_cast<long long>(r.n_cells),
           status[k]});
    if (status[k] != "ok") {
      std::cerr << "coefficients: d=" << fmt(r.d) << " " << status[k] << "\n";
      code = kNumerical;
      ctx.expect(false, "d=" + fmt(r.d) + " " + status[k]);
      continue;
    }
    if (unit_nu) {
      const double c1_exact = 1.0 / std::tanh(1.0 / r.d) - r.d;
      ctx.expect(std::abs(r.c1 - c1_exact) <= 1e-10, "d=" + fmt(r.d) + " c1 differs from coth(1/d) - d");
      ctx.expect(std::abs(r.lambda - r.d) <= 1e-10 * std::max(1.0, r.d), "d=" + fmt(r.d) + " lambda differs from d");
    }
  }
  ctx.note(write_table(ctx.dir, "coefficients", ctx.opts.format, ctx.prov, t));
  return ctx.finish(code);
}

// ---------------------------------------------------------------------------

int cmd_relaxation(const Config& config, Context& ctx) {
  const auto cfg = load_relaxation(config);
  const auto r = run_relaxation(cfg.relaxation, ctx.opts.seed);

  Table ts{{"step", "time", "order", "dissipation", "dissipation_ma"}, {}};
  for (std::size_t k = 0; k < r.times.size(); ++k)
    ts.add({static_cast<long long>(std::llround(r.times[k] / cfg.relaxation.dt)), r.times[k], r.order[k],
            r.dissipation[k], k < r.dissipation_ma.size() ? Cell{r.dissipation_ma[k]} : Cell{std::string()}});
  ctx.note(write_table(ctx.dir, "relaxation_timeseries", ctx.opts.format, ctx.prov, ts));

  Table hist{{"bin", "mu_lo", "mu_hi", "empirical", "expected"}, {}};
  for (std::size_t b = 0; b < r.histogram.size(); ++b)
    hist.add({static_cast<long long>(b), r.bin_edges[b], r.bin_edges[b + 1], r.histogram[b], r.expected[b]});
  ctx.note(write_table(ctx.dir, "relaxation_histogram", ctx.opts.format, ctx.prov, hist));

  json body{{"l1", r.l1},
            {"final_order", r.final_order},
            {"h_noise_floor", r.h_noise_floor},
            {"h_non_increasing", r.h_non_increasing},
            {"converged", r.converged}};
  if (!r.converged) std::cerr << "relaxation: not converged, L1 = " << fmt(r.l1) << " > 0.05\n";
  ctx.expect(r.converged, "L1 = " + fmt(r.l1) + " >= 0.05");
  ctx.expect(r.h_non_increasing, "dissipation moving average increases");

  if (cfg.autocorrelation) {
    const auto a = run_autocorrelation(cfg.autocorr, ctx.opts.seed);
    Table at{{"step", "time", "mean", "expected", "sigma", "z"}, {}};
    for (std::size_t k = 0; k < a.times.size(); ++k)
      at.add({static_cast<long long>(std::llround(a.times[k] / cfg.autocorr.dt)), a.times[k], a.mean[k],
              a.expected[k], a.sigma[k], a.sigma[k] > 0 ? (a.mean[k] - a.expected[k]) / a.sigma[k] : 0.0});
    ctx.note(write_table(ctx.dir, "autocorrelation", ctx.opts.format, ctx.prov, at));
    body["autocorrelation_max_abs_z"] = a.max_abs_z;
    ctx.expect(a.max_abs_z <= 3.0, "autocorrelation off by " + fmt(a.max_abs_z) + " sigma");
  }
  ctx.note(write_report(ctx.dir, "relaxation_summary", ctx.prov, body));
  std::cout << "L1 = " << fmt(r.l1) << ", final order = " << fmt(r.final_order) << "\n";
  return ctx.finish(kOk);
}

// ---------------------------------------------------------------------------

int cmd_order(const Config& config, Context& ctx) {
  const auto p = load_order(config);
  const auto r = run_order_vs_c1(p, ctx.opts.seed);
  for (const auto& w : r.warnings) std::cerr << "order-vs-c1: warning: " << w << "\n";

  Table t{{"d", "c1", "order_mean", "order_sem", "global_mean", "rel_deviation"}, {}};
  for (const auto& row : r.rows) {
    t.add({row.d, row.c1, row.order_mean, row.order_sem, row.global_mean, row.rel_deviation});
    if (row.d >= 0.2 && row.d <= 2.0)
      ctx.expect(std::abs(row.rel_deviation) < 0.1, "d=" + fmt(row.d) + " deviates by " + fmt(row.rel_deviation));
  }
  ctx.note(write_table(ctx.dir, "order_vs_c1", ctx.opts.format, ctx.prov, t));
  if (r.rows.size() >= 2) ctx.expect(r.spearman < 0.0, "order does not decrease with d");
  if (r.rows.size() >= 3) ctx.expect(r.max_jump_ratio < 3.0, "jump ratio " + fmt(r.max_jump_ratio) + " >= 3");
  ctx.note(write_report(ctx.dir, "order_vs_c1_summary", ctx.prov,
                        json{{"box", r.box},
                             {"particles_per_ball", r.particles_per_ball},
                             {"spearman", r.spearman},
                             {"max_jump_ratio", r.max_jump_ratio},
                             {"warnings", r.warnings}}));
  return ctx.finish(kOk);
}

// ---------------------------------------------------------------------------

int cmd_kernel_expansion(const Config& config, Context& ctx) {
  const auto p = load_kernel_expansion(config);
  const auto r = run_kernel_expansion(p);
  Table t{{"eps", "error", "ratio_to_next"}, {}};
  for (std::size_t k = 0; k < r.eps.size(); ++k)
    t.add({r.eps[k], r.error[k], k < r.ratios.size() ? Cell{r.ratios[k]} : Cell{std::string()}});
  ctx.note(write_table(ctx.dir, "kernel_expansion", ctx.opts.format, ctx.prov, t));

  if (p.field == "constant") {
    for (std::size_t k = 0; k < r.error.size(); ++k)
      ctx.expect(r.error[k] < 1e-10, "eps=" + fmt(r.eps[k]) + " error " + fmt(r.error[k]) + " for a constant field");
  } else {
    if (!r.fit_ok) std::cerr << "kernel-expansion: failed fit, R^2 = " << fmt(r.fit.r2) << " < 0.98\n";
    ctx.expect(r.fit_ok, "R^2 = " + fmt(r.fit.r2) + " < 0.98");
    ctx.expect(r.fit.slope >= 1.8 && r.fit.slope <= 2.2, "slope " + fmt(r.fit.slope) + " outside [1.8, 2.2]");
  }
  ctx.note(write_report(ctx.dir, "kernel_expansion_summary", ctx.prov,
                        json{{"field", p.field},
                             {"slope", r.fit.slope},
                             {"intercept", r.fit.intercept},
                             {"r2", r.fit.r2},
                             {"fit_ok", r.fit_ok}}));
  std::cout << "slope = " << fmt(r.fit.slope) << ", R^2 = " << fmt(r.fit.r2) << "\n";
  return ctx.finish(kOk);
}

// ---------------------------------------------------------------------------

int cmd_wave_speed(const Config& config, Context& ctx) {
  const auto cfg = load_wave_speed(config);
  const auto coeffs = resolve(cfg.coeffs);
  Table t{{"theta0", "mode", "expected", "measured", "error", "growth", "measured_ok", "contaminated", "note"}, {}};
  for (double theta : cfg.theta_list) {
    WaveSpeedParams p = cfg.base;
    p.c = coeffs.c;
    p.lambda = coeffs.lambda;
    p.theta0 = theta;
    const auto r = measure_wave_speeds(p);
    for (const auto& m : r.modes) {
      t.add({theta, m.name, m.expected, m.measured, m.error, m.growth, static_cast<long long>(m.measured_ok),
             static_cast<long long>(m.contaminated), m.note});
      if (m.contaminated)
        std::cerr << "wave-speed: theta0=" << fmt(theta) << " " << m.name << " contaminated (growth " << fmt(m.growth)
                  << ")\n";
      if (m.measured_ok) {
        ctx.expect(m.error < 0.02, "theta0=" + fmt(theta) + " " + m.name + " error " + fmt(m.error));
        ctx.expect(!m.contaminated, "theta0=" + fmt(theta) + " " + m.name + " nonlinear contamination");
      }
    }
  }
  ctx.note(write_table(ctx.dir, "wave_speed", ctx.opts.format, ctx.prov, t));
  return ctx.finish(kOk);
}

// ---------------------------------------------------------------------------

int cmd_simulate(const Config& config, Context& ctx) {
  const auto cfg = load_simulate(config);
  ParticleState s;
  if (!cfg.resume.empty()) {
    try {
      s = read_checkpoint(cfg.resume);
    } catch (const std::runtime_error& e) {
      throw ConfigError("particles.resume", e.what());
    }
    if (s.size() != cfg.n) throw ConfigError("particles.n", "does not match the checkpoint (" + std::to_string(s.size()) + ")");
    if (s.box != cfg.box) throw ConfigError("particles.box", "does not match the checkpoint (" + fmt(s.box) + ")");
    ctx.prov.seed = s.seed;  // streams continue from the checkpointed seed
  } else {
    s = make_state(cfg.n, cfg.box, ctx.opts.seed, cfg.init);
  }
  cfg.model.validate();

  const SplitStepper split(cfg.model, cfg.dt);
  auto advance = [&] {
    if (cfg.integrator == "discrete") s = step_discrete(s, cfg.dt, cfg.model);
    else if (cfg.integrator == "split") s = split.step(s);
    else s = step_continuous(s, cfg.dt, cfg.model);
  };

  Table traj{{"step", "time", "order", "mx", "my", "mz"}, {}};
  const auto moments_path = ctx.dir / "moments.csv";
  std::ofstream moments(moments_path, std::ios::binary);
  if (!moments) throw std::runtime_error("cannot write '" + moments_path.string() + "'");
  moments << provenance_line(ctx.prov) << '\n' << kMomentColumns << '\n';
  std::ofstream particles;
  if (cfg.particles_csv) {
    particles.open(ctx.dir / "particles.csv", std::ios::binary);
    if (!particles) throw std::runtime_error("cannot write particles.csv");
    particles << provenance_line(ctx.prov) << '\n' << kParticleColumns << '\n';
  }
  auto record = [&] {
    const Vec3 m = mean_orientation(s);
    traj.add({static_cast<long long>(s.step), s.time, m.norm(), m.x(), m.y(), m.z()});
    const auto field = compute_moments(s, cfg.bins);
    if (field.total_mass() != s.size()) throw NumericalError("moment binning lost particles");
    write_moment_rows(moments, field, s.step, s.time);
    if (cfg.particles_csv) write_particle_rows(particles, s);
  };

  record();
  for (long long k = 1; k <= cfg.steps; ++k) {
    advance();
    if (k % cfg.output_every == 0 || k == cfg.steps) record();
  }
  ctx.note(write_table(ctx.dir, "trajectory", ctx.opts.format, ctx.prov, traj));
  ctx.note(moments_path);
  if (cfg.particles_csv) ctx.note(ctx.dir / "particles.csv");
  if (cfg.checkpoint) {
    const auto path = ctx.dir / "checkpoint.bin";
    write_checkpoint(path.string(), s);
    ctx.note(path);
  }
  ctx.expect(s.size() == cfg.n, "particle count changed");
  std::cout << "step " << s.step << ", time " << fmt(s.time) << ", order " << fmt(order_parameter(s)) << "\n";
  return ctx.finish(kOk);
}

// ---------------------------------------------------------------------------

HydroState1D hydro_initial(const HydroRunConfig& cfg, const RescaledCoefficients& coeffs) {
  HydroState1D s;
  s.length = cfg.length;
  s.coeffs = coeffs;
  const int n = cfg.n_z;
  s.rho.resize(n);
  s.theta.resize(n);
  s.phi.resize(n);
  const double two_pi = 2.0 * std::numbers::pi;
  for (int i = 0; i < n; ++i) {
    const double z = (i + 0.5) * cfg.length / n;
    double shape;
    if (cfg.initial == "sine") {
      shape = std::sin(two_pi * z / cfg.length);
    } else {
      const double u = (z - 0.5 * cfg.length) / (cfg.width * cfg.length);
      shape = std::exp(-0.5 * u * u);
    }
    s.rho[i] = cfg.rho0 + cfg.amp_rho * shape;
    s.theta[i] = std::clamp(cfg.theta0 + cfg.amp_theta * shape, 0.0, std::numbers::pi);
    double phi = std::fmod(cfg.phi0 + cfg.amp_phi * shape, two_pi);
    if (phi < 0.0) phi += two_pi;
    if (phi >= two_pi) phi = 0.0;
    s.phi[i] = phi;
  }
  s.validate();
  return s;
}

void write_snapshot(const fs::path& path, const Provenance& prov, const HydroState1D& s, long long step) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << provenance_line(prov) << '\n' << "# step=" << step << " time=" << fmt(s.time) << '\n' << "z,rho,theta,phi\n";
  const double dz = s.dz();
  for (std::size_t i = 0; i < s.size(); ++i)
    out << fmt((i + 0.5) * dz) << ',' << fmt(s.rho[i]) << ',' << fmt(s.theta[i]) << ',' << fmt(s.phi[i]) << '\n';
}

int cmd_hydro(const Config& config, Context& ctx) {
  const auto cfg = load_hydro(config);
  const auto coeffs = resolve(cfg.coeffs);
  if (!(coeffs.lambda >= 0.0)) throw ConfigError("hydro.lambda", "rescaled lambda must be >= 0");
  HydroState1D s = hydro_initial(cfg, coeffs);

  const double mass0 = s.mass();
  long long steps = 0;
  double max_step_drift = 0.0;
  json snapshots = json::array();
  auto snapshot = [&] {
    char name[64];
    std::snprintf(name, sizeof name, "hydro_snapshot_%04zu.csv", snapshots.size());
    write_snapshot(ctx.dir / name, ctx.prov, s, steps);
    snapshots.push_back(json{{"file", name}, {"step", steps}, {"time", s.time}, {"mass", s.mass()}});
  };

  snapshot();
  const long long n_out = std::max<long long>(1, std::llround(cfg.t_end / cfg.output_every));
  for (long long k = 1; k <= n_out; ++k) {
    const double target = k == n_out ? cfg.t_end : k * cfg.output_every;
    while (s.time < target) {
      double dt = stable_dt(s, cfg.cfl);
      const double remaining = target - s.time;
      // Stop exactly on the output time; tiny leftovers are absorbed into the last step.
      if (!(dt < remaining) || remaining - dt < 1e-12 * std::max(1.0, target)) dt = remaining;
      const double before = s.mass();
      s = step_hydro(s, dt);
      s.time = (remaining == dt) ? target : s.time;
      max_step_drift = std::max(max_step_drift, std::abs(s.mass() - before) / before);
      ++steps;
    }
    snapshot();
  }
  const double drift = std::abs(s.mass() - mass0) / mass0;
  ctx.expect(max_step_drift <= 1e-12, "mass drift per step " + fmt(max_step_drift));

  const auto gamma = eigenvalues(cfg.theta0, coeffs.c, coeffs.lambda);
  ctx.note(write_report(ctx.dir, "hydro_run", ctx.prov,
                        json{{"columns", {"z", "rho", "theta", "phi"}},
                             {"coefficients", {{"c", coeffs.c}, {"lambda", coeffs.lambda}, {"source", cfg.coeffs.kind}}},
                             {"grid", {{"n_z", cfg.n_z}, {"length", cfg.length}, {"dz", cfg.length / cfg.n_z}}},
                             {"cfl", cfg.cfl},
                             {"t_end", cfg.t_end},
                             {"steps", steps},
                             {"initial",
                              {{"kind", cfg.initial},
                               {"rho0", cfg.rho0},
                               {"theta0", cfg.theta0},
                               {"phi0", cfg.phi0},
                               {"amp_rho", cfg.amp_rho},
                               {"amp_theta", cfg.amp_theta},
                               {"amp_phi", cfg.amp_phi},
                               {"width", cfg.width}}},
                             {"base_eigenvalues", {gamma.gamma_minus, gamma.gamma_0, gamma.gamma_plus}},
                             {"mass_initial", mass0},
                             {"mass_final", s.mass()},
                             {"mass_relative_drift", drift},
                             {"max_step_mass_drift", max_step_drift},
                             {"snapshots", snapshots}}));
  std::cout << snapshots.size() << " snapshots, " << steps << " steps, relative mass drift " << fmt(drift) << "\n";
  return ctx.finish(kOk);
}

}  // namespace

int run_command(const std::string& command, const Config& config, const GlobalOptions& opts) {
  const auto sections = command_sections(command);
  if (opts.format != "csv" && opts.format != "json") throw ConfigError("--format", "must be csv or json");
  Context ctx{command, opts, Provenance{command, config.hash(sections), opts.seed}, fs::path(opts.out_dir), {}};

  // Parse everything up front so a bad field never leaves partial output behind.
  if (command == "coefficients") load_coefficients(config);
  else if (command == "relaxation") load_relaxation(config);
  else if (command == "order-vs-c1") load_order(config);
  else if (command == "kernel-expansion") load_kernel_expansion(config);
  else if (command == "wave-speed") load_wave_speed(config);
  else if (command == "simulate") load_simulate(config).model.validate();
  else if (command == "hydro-run") load_hydro(config);

  std::error_code ec;
  fs::create_directories(ctx.dir, ec);
  if (ec) throw ConfigError("--out", "cannot create '" + opts.out_dir + "': " + ec.message());

  if (command == "coefficients") return cmd_coefficients(config, ctx);
  if (command == "relaxation") return cmd_relaxation(config, ctx);
  if (command == "order-vs-c1") return cmd_order(config, ctx);
  if (command == "kernel-expansion") return cmd_kernel_expansion(config, ctx);
  if (command == "wave-speed") return cmd_wave_speed(config, ctx);
  if (command == "simulate") return cmd_simulate(config, ctx);
  return cmd_hydro(config, ctx);
}

}  // namespace cva::wb
