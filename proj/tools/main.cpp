// ksgas: correlation functions of classical gases from the activity series,
// with certified residuals against the equilibrium equations.
//
// Usage: ksgas <subcommand> <config.json>
//
// Exit codes: 0 all-pass, 1 certification failure, 2 usage/config error,
// 3 completed with flagged rows (outside the proven convergence radius).

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ksgas/cli.hpp"
#include "ksgas/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Equilibrium correlation functions of classical gases, certified numerically"};
  app.require_subcommand(1);

  const struct {
    const char* name;
    const char* help;
  } commands[] = {
      {"tabulate", "Tabulate a correlation function over a separation grid (CSV)"},
      {"certify", "Run residual suites against the equilibrium equations (JSON)"},
      {"invert", "Recover the activity from the state's own correlations (JSON)"},
      {"hardrod", "Closed-form hard-rod pair table with clustering gap (CSV)"},
      {"hclimit", "Sharpness sweep against the exact hard-rod limit (CSV + JSON summary)"},
      {"bounds", "Convergence radii and tail bounds for the configured run (JSON)"},
  };

  std::string config_path;
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("config", config_path, "Path to the run configuration (JSON)")->required();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help/version exit cleanly; usage errors map to 2
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    const ksgas::cli::RunConfig cfg = ksgas::cli::load_config(config_path);
    return ksgas::cli::run_command(name, cfg, std::cout, std::cerr);
  } catch (const ksgas::cli::ConfigError& e) {
    std::cerr << "ksgas: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "ksgas: invalid configuration: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "ksgas: invalid configuration: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "ksgas: error: " << e.what() << "\n";
    return 2;
  }
}
