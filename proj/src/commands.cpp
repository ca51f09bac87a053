#include "predictorlab/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <system_error>

#include "predictorlab/io.hpp"
#include "predictorlab/scenario.hpp"

namespace predictorlab {

namespace {

std::string out_path(const std::string& out_dir, const char* name) {
  if (out_dir.empty()) return name;
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + out_dir + " (" + ec.message() + ")");
  const char last = out_dir.back();
  return (last == '/') ? out_dir + name : out_dir + "/" + name;
}

void put(std::ostringstream& out, const char* key, double value) {
  out << key << " = " << g17(value) << '\n';
}

void put(std::ostringstream& out, const char* key, bool value) {
  out << key << " = " << (value ? 1 : 0) << '\n';
}

void put(std::ostringstream& out, const char* key, const std::string& value) {
  out << key << " = " << value << '\n';
}

void put_matrix(std::ostringstream& out, const std::string& key, const Matrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      out << key << '[' << i << "][" << j << "] = " << g17(m(i, j)) << '\n';
    }
}

SimTrace run_scenario(const Scenario& scenario) {
  SimTrace trace = simulate_closed_loop(scenario.plant, scenario.gains, scenario.sim,
                                        scenario.mode);
  compute_derived_signals(trace, scenario.plant);
  for (const std::string& w : trace.warnings) std::cerr << "warning: " << w << '\n';
  return trace;
}

}  // namespace

int cmd_simulate(const std::string& scenario_path, const std::string& out_dir,
                 const std::optional<std::string>& mode_override) {
  Scenario scenario = parse_scenario_file(scenario_path);
  if (mode_override) scenario.mode = mode_from_name(*mode_override);

  const SimTrace trace = run_scenario(scenario);
  write_trace_csv(trace, out_path(out_dir, "trace.csv"));

  const ResidualReport report =
      residual_report(trace, scenario.plant, scenario.gains);
  std::ostringstream out;
  put(out, "mode", std::string(mode_name(trace.mode)));
  put(out, "h", trace.h);
  put(out, "t_end", trace.t.back());
  put(out, "steps", static_cast<double>(trace.steps()));
  put(out, "diverged", trace.diverged);
  if (trace.diverged) put(out, "diverged_at", trace.diverged_at);
  put(out, "max_zeta_norm", report.max_zeta_norm);
  put(out, "max_z_norm", report.max_z_norm);
  put(out, "residual_zeta_dynamics", report.max_zeta_dynamics);
  put(out, "residual_z_dynamics", report.max_z_dynamics);
  put(out, "residual_flow_map", report.max_flow_map);
  put(out, "identity_applicable", trace.identity_applicable);
  if (trace.identity_applicable) {
    put(out, "identity_residual", trace.identity_max_residual);
    put(out, "identity_tol", trace.identity_tol);
    put(out, "identity_ok", trace.identity_ok);
  }
  write_file_atomic(out_path(out_dir, "residuals.txt"), out.str());

  return trace.diverged ? kExitNumerical : kExitOk;
}

int cmd_analyze(const std::string& scenario_path, const std::string& out_dir) {
  const Scenario scenario = parse_scenario_file(scenario_path);

  const ValidationReport gains_report =
      validate_gains(scenario.plant, scenario.gains);
  const DiscreteMap map = discrete_map(scenario.plant, scenario.gains);
  const LyapunovCertificate cert = lyapunov_certificate_discrete(map);
  const double integral_residual =
      integral_identity_residual(scenario.plant.A, scenario.gains.L,
                                 scenario.plant.D, 10000);

  std::ostringstream out;
  put(out, "delay", scenario.plant.D);
  put(out, "period", scenario.gains.T);
  put(out, "gains_valid", gains_report.all_pass);
  for (const ValidationItem& item : gains_report.items) {
    put(out, ("check_" + item.name).c_str(), item.pass);
    put(out, ("check_" + item.name + "_value").c_str(), item.value);
  }
  put(out, "abscissa_plant", gains_report.abscissa_A);
  put(out, "abscissa_correction", gains_report.abscissa_H);
  put_matrix(out, "G1", map.g1);
  put_matrix(out, "G2", map.g2);
  put(out, "rho", map.rho);
  put(out, "spectral_stable", map.rho < 1.0);
  put(out, "alpha", cert.alpha);
  put(out, "beta", cert.beta);
  put(out, "lyapunov_valid", cert.valid);
  put(out, "integral_identity_residual", integral_residual);
  write_file_atomic(out_path(out_dir, "analysis.txt"), out.str());
  return kExitOk;
}

int cmd_sweep(const std::string& scenario_path, const std::string& out_dir,
              double t_lo, double t_hi, double t_step, const std::string& criterion) {
  const Scenario scenario = parse_scenario_file(scenario_path);
  SweepCriterion crit;
  if (criterion == "spectral") {
    crit = SweepCriterion::spectral;
  } else if (criterion == "lyapunov") {
    crit = SweepCriterion::lyapunov;
  } else {
    throw std::domain_error("criterion must be 'spectral' or 'lyapunov', got '" +
                            criterion + "'");
  }

  const SweepResult result = find_min_stable_T(scenario.plant, scenario.gains.K,
                                               scenario.gains.L, t_lo, t_hi, t_step,
                                               crit);
  write_sweep_csv(result, out_path(out_dir, "sweep.csv"));
  if (result.found) {
    std::cout << "min_stable_T = " << g17(result.min_stable_period) << '\n';
  } else {
    std::cout << "min_stable_T = not found on grid\n";
  }
  return kExitOk;
}

int cmd_verify(const std::string& scenario_path, const std::string& out_dir) {
  const Scenario scenario = parse_scenario_file(scenario_path);
  if (scenario.mode != SimMode::modified)
    throw std::domain_error("verify requires mode = modified");

  const SimTrace trace = run_scenario(scenario);
  const double h_scale = std::max(1.0, trace.h / 1e-4);

  std::ostringstream out;
  bool all_pass = true;
  auto record = [&](const char* name, double value, double tol, bool pass) {
    put(out, name, value);
    put(out, (std::string(name) + "_tol").c_str(), tol);
    put(out, (std::string(name) + "_pass").c_str(), pass);
    all_pass = all_pass && pass;
  };

  put(out, "h", trace.h);
  put(out, "t_end", trace.t.back());
  put(out, "diverged", trace.diverged);

  // Gain validation is a named negative-control channel: flipping the sign of
  // a working L must surface here.
  const ValidationReport gains_report =
      validate_gains(scenario.plant, scenario.gains);
  put(out, "gains_valid", gains_report.all_pass);
  all_pass = all_pass && gains_report.all_pass;

  if (trace.diverged) {
    // The trace is truncated; the remaining checks would measure garbage.
    put(out, "diverged_at", trace.diverged_at);
    put(out, "trace_checks", std::string("skipped: trajectory diverged"));
    put(out, "all_pass", false);
    write_file_atomic(out_path(out_dir, "verify.txt"), out.str());
    return kExitNumerical;
  }

  const ResidualReport report =
      residual_report(trace, scenario.plant, scenario.gains);
  const double zeta_scale = std::max(1.0, report.max_zeta_norm);
  const double z_scale = std::max(1.0, report.max_z_norm);
  record("residual_zeta_dynamics", report.max_zeta_dynamics,
         5e-3 * zeta_scale * h_scale,
         report.max_zeta_dynamics <= 5e-3 * zeta_scale * h_scale);
  record("residual_z_dynamics", report.max_z_dynamics, 1e-4 * z_scale * h_scale,
         report.max_z_dynamics <= 1e-4 * z_scale * h_scale);
  record("residual_flow_map", report.max_flow_map,
         1e-3 * report.max_z_norm * h_scale,
         report.max_flow_map <= 1e-3 * report.max_z_norm * h_scale);

  put(out, "identity_residual", trace.identity_max_residual);
  put(out, "identity_tol", trace.identity_tol);
  put(out, "identity_pass", trace.identity_ok);
  all_pass = all_pass && trace.identity_ok;

  const XiSequence xi = xi_recursion_check(trace, scenario.plant, scenario.gains);
  record("recursion_residual", xi.max_rel_residual, 5e-2 * h_scale,
         xi.max_rel_residual <= 5e-2 * h_scale);

  const double integral_residual =
      integral_identity_residual(scenario.plant.A, scenario.gains.L,
                                 scenario.plant.D, 10000);
  record("integral_identity_residual", integral_residual, 1e-8,
         integral_residual <= 1e-8);

  const DiscreteMap map = discrete_map(scenario.plant, scenario.gains);
  const LyapunovCertificate cert = lyapunov_certificate_discrete(map);
  put(out, "rho", map.rho);
  put(out, "alpha", cert.alpha);
  put(out, "beta", cert.beta);
  put(out, "lyapunov_valid", cert.valid);
  const SequenceCheck seq = lyapunov_sequence_check(xi, cert);
  if (seq.applicable) {
    put(out, "v_decrease_worst_ratio", seq.worst_ratio);
    put(out, "v_decrease_pass", seq.pass);
    all_pass = all_pass && seq.pass;
  } else {
    put(out, "v_decrease", std::string("not applicable"));
  }

  const EnvelopeCheck env = z_envelope_check(trace, scenario.plant, scenario.gains);
  put(out, "envelope", env.envelope);
  put(out, "envelope_tol", env.tol_abs);
  put(out, "envelope_pass", env.pass);
  all_pass = all_pass && env.pass;

  put(out, "all_pass", all_pass);
  write_file_atomic(out_path(out_dir, "verify.txt"), out.str());
  return all_pass ? kExitOk : kExitNumerical;
}

}  // namespace predictorlab
