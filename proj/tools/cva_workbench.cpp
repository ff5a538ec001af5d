#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cva/exec.hpp"
#include "cva/gci.hpp"
#include "cva/workbench/commands.hpp"
#include "cva/workbench/output.hpp"

int main(int argc, char** argv) {
  using namespace cva::wb;
  CLI::App app{"Hydrodynamic-limit workbench for the Couzin-Vicsek alignment model"};
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
  app.require_subcommand(1);
  app.footer(
      "\nExit codes: 0 success, 1 validation failure, 2 numerical failure, 3 --check failure.\n\n" + config_help());

  GlobalOptions opts;
  app.add_option("--config", opts.config_path, "configuration file (defaults are used for missing keys)")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", opts.seed, "random seed")->capture_default_str();
  app.add_option("--out", opts.out_dir, "output directory")->capture_default_str();
  app.add_option("--threads", opts.threads, "OpenMP threads (0: runtime default)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  app.add_option("--format", opts.format, "table format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app.add_flag("--check", opts.check, "verify the command's acceptance thresholds; exit 3 on failure");

  const std::pair<const char*, const char*> commands[] = {
      {"coefficients", "GCI coefficients c1, c2, lambda for each d"},
      {"relaxation", "homogeneous relaxation of the particle system towards the equilibrium"},
      {"order-vs-c1", "order parameter of dense interacting runs against c1(d)"},
      {"kernel-expansion", "convergence of the kernel mean direction as the kernel scale shrinks"},
      {"wave-speed", "linear wave speeds of the hydrodynamic system against the eigenvalues"},
      {"simulate", "particle simulation with order, moment and checkpoint output"},
      {"hydro-run", "run the 1D hydrodynamic solver and write snapshots"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (opts.threads > 0) cva::set_num_threads(opts.threads);
    const Config config = opts.config_path.empty() ? Config() : Config::from_file(opts.config_path);
    return run_command(command, config, opts);
  } catch (const cva::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kValidation;
  } catch (const std::domain_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
}
