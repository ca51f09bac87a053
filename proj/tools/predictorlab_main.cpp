#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "predictorlab/commands.hpp"
#include "predictorlab/io.hpp"
#include "predictorlab/scenario.hpp"

int main(int argc, char** argv) {
  using namespace predictorlab;

  CLI::App app{"Delay-compensating predictor toolkit: simulate, analyze, sweep, "
               "verify"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir;
  std::optional<std::string> mode_override;
  double t_lo = 1.5, t_hi = 40.0, t_step = 0.5;
  std::string criterion = "spectral";

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
    cmd->add_option("--out", out_dir, "Output directory (must exist)")->required();
  };

  CLI::App* simulate = app.add_subcommand(
      "simulate", "Run the scenario; write trace.csv and residuals.txt");
  add_common(simulate);
  std::string mode_value;
  CLI::Option* mode_opt =
      simulate->add_option("--mode", mode_value,
                           "Override the scenario mode "
                           "(modified | classical | open_loop)");

  CLI::App* analyze = app.add_subcommand(
      "analyze", "Gain validation and discrete-map certificates; write analysis.txt");
  add_common(analyze);

  CLI::App* sweep = app.add_subcommand(
      "sweep", "Scan the reset period; write sweep.csv and print the threshold");
  add_common(sweep);
  sweep->add_option("--t-lo", t_lo, "Smallest period on the grid");
  sweep->add_option("--t-hi", t_hi, "Largest period on the grid");
  sweep->add_option("--t-step", t_step, "Grid spacing");
  sweep->add_option("--criterion", criterion, "spectral | lyapunov");

  CLI::App* verify = app.add_subcommand(
      "verify", "Run every trace-level check at its pinned tolerance; write "
                "verify.txt");
  add_common(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exits 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the parse diagnostic
    return kExitConfig;
  }

  if (mode_opt->count() > 0) mode_override = mode_value;

  try {
    if (simulate->parsed()) return cmd_simulate(scenario_path, out_dir, mode_override);
    if (analyze->parsed()) return cmd_analyze(scenario_path, out_dir);
    if (sweep->parsed())
      return cmd_sweep(scenario_path, out_dir, t_lo, t_hi, t_step, criterion);
    if (verify->parsed()) return cmd_verify(scenario_path, out_dir);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ScenarioError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;  // unreachable: a subcommand is required
}
