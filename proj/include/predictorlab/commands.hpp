#pragma once

#include <optional>
#include <string>

#include "predictorlab/stability.hpp"

namespace predictorlab {

// Process exit codes shared by the command layer and the CLI front end.
//   0  success
//   1  I/O failure (unreadable scenario, unwritable output)
//   2  numerical failure (trajectory diverged, or a verification check failed)
//   3  configuration/domain error (bad JSON, bad schema, bad grid, T <= D, ...)
inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitConfig = 3;

// Runs the scenario and writes <out_dir>/trace.csv and <out_dir>/residuals.txt.
// Returns kExitNumerical when the trajectory hits the divergence guard (the
// partial trace is still written), kExitOk otherwise.
int cmd_simulate(const std::string& scenario_path, const std::string& out_dir,
                 const std::optional<std::string>& mode_override);

// Writes <out_dir>/analysis.txt: gain validation, the discrete-map blocks,
// spectral radius, quadratic-certificate numbers, and verdicts.
int cmd_analyze(const std::string& scenario_path, const std::string& out_dir);

// Scans the reset period and writes <out_dir>/sweep.csv; prints the smallest
// stable grid period (or reports that none qualifies).  Always kExitOk unless
// the grid itself is invalid.
int cmd_sweep(const std::string& scenario_path, const std::string& out_dir,
              double t_lo, double t_hi, double t_step, const std::string& criterion);

// Runs the scenario and writes <out_dir>/verify.txt with every trace-level
// check at its pinned tolerance.  kExitOk iff all applicable checks pass.
int cmd_verify(const std::string& scenario_path, const std::string& out_dir);

}  // namespace predictorlab
