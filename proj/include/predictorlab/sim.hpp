#pragma once

// Fixed-step (explicit Euler) closed-loop simulation with exact delay-line
// indexing: D and T must be integer multiples of h, so delayed reads and
// reset instants are index arithmetic, never interpolation or accumulated
// floating-point time.

#include <cstddef>
#include <string>
#include <vector>

#include "predictorlab/model.hpp"

namespace predictorlab {

enum class SimMode {
  modified,   // full predictor with correction and resets
  classical,  // zeta and eps forced identically zero (no correction)
  open_loop,  // u forced identically zero (predictor machinery still runs)
};

std::string mode_name(SimMode mode);
SimMode mode_from_name(const std::string& name);  // throws std::invalid_argument

struct SimConfig {
  double h;      // step, seconds, > 0
  double t_end;  // horizon, seconds
  Vector x0;     // initial plant state
};

// Ring buffer of vectors; reading returns the sample pushed exactly `depth`
// steps earlier, zero vectors during pre-history.  depth 0 = no delay.
class DelayLine {
 public:
  DelayLine(std::size_t width, std::size_t depth);
  std::size_t width() const { return width_; }
  std::size_t depth() const { return depth_; }
  // Returns the delayed sample, then stores `sample` (one call per step).
  Vector push_and_read(const Vector& sample);

 private:
  std::size_t width_;
  std::size_t depth_;
  std::size_t cursor_ = 0;
  std::vector<double> buf_;
};

// Column-major-in-time trace: column c of width w stores step k at
// [k*w .. k*w+w).  Timestamps are t_k = k*h computed by multiplication.
struct SimTrace {
  double h = 0.0;
  double D = 0.0;
  double T = 0.0;
  SimMode mode = SimMode::modified;
  std::size_t n = 0;         // state dimension
  std::size_t m = 0;         // input dimension
  std::size_t r_delay = 0;   // D/h in steps
  std::size_t r_period = 0;  // T/h in steps

  bool diverged = false;     // state norm crossed 1e12; trace is partial
  double diverged_at = 0.0;  // first instant past the guard (not recorded)
  std::vector<std::string> warnings;

  std::vector<double> t;
  std::vector<double> x, u, psi, eps, zeta;  // filled by the simulation
  std::vector<double> z, xi;                 // filled by compute_derived_signals

  bool has_derived = false;
  double identity_max_residual = 0.0;  // max ||xi - (e^{-AD} z - eps(t-D))||
  double identity_tol = 0.0;           // 1e-8 (1 + max ||z||)
  bool identity_applicable = true;     // false in classical mode (zeta forced)
  bool identity_ok = true;

  std::size_t steps() const { return t.size(); }
  Vector x_at(std::size_t k) const { return col_at(x, n, k); }
  Vector u_at(std::size_t k) const { return col_at(u, m, k); }
  Vector psi_at(std::size_t k) const { return col_at(psi, n, k); }
  Vector eps_at(std::size_t k) const { return col_at(eps, n, k); }
  Vector zeta_at(std::size_t k) const { return col_at(zeta, n, k); }
  Vector z_at(std::size_t k) const { return col_at(z, n, k); }
  Vector xi_at(std::size_t k) const { return col_at(xi, n, k); }

 private:
  static Vector col_at(const std::vector<double>& col, std::size_t w,
                       std::size_t k);
};

// Integrates plant + controller by explicit Euler.  Per step, in order:
// (a) reset eps on the grid t = mT, (b) read delayed samples, (c) zeta,
// (d) u, (e) record, (f) simultaneous Euler advance, (g) push this step's
// samples into the delay lines ((b) and (g) are one push_and_read call per
// line).  Divergence guard: max(||x||, ||psi||, ||eps||) > 1e12 stops the
// run and flags the partial trace (not an exception, so callers can still
// export what was simulated).
SimTrace simulate_closed_loop(const Plant& plant, const PredictorGains& gains,
                              const SimConfig& config, SimMode mode);

// Fills z = zeta + eps (exact sum) and xi = x - x(t-D) - psi(t-D) (zero
// pre-history), then checks the algebraic identity
// xi(t) = e^{-AD} z(t) - eps(t-D) to 1e-8 (1 + max||z||) and annotates the
// max residual.  Not applicable in classical mode (zeta is forced to zero
// there, not computed from its formula).
SimTrace& compute_derived_signals(SimTrace& trace, const Plant& plant);

struct IntervalResidual {
  std::size_t first = 0;  // first step index of the inter-jump interval
  std::size_t last = 0;   // last step index (inclusive)
  std::size_t samples = 0;
  double zeta_dynamics = 0.0;  // max ||d zeta/dt - (A - L) zeta||
  double z_dynamics = 0.0;     // max ||d z/dt - A z||
  double flow_map = 0.0;       // max ||z(t) - e^{A (t - t_first)} z(t_first)||
};

struct ResidualReport {
  std::vector<IntervalResidual> intervals;
  double max_zeta_dynamics = 0.0;
  double max_z_dynamics = 0.0;
  double max_flow_map = 0.0;
  double max_zeta_norm = 0.0;  // scales, for relative thresholds
  double max_z_norm = 0.0;
};

// Central finite differences on each inter-jump interval (jumps at t = mT and
// t = mT + D), excluding the 2 samples adjacent to each jump.  Requires
// derived signals.
ResidualReport residual_report(const SimTrace& trace, const Plant& plant,
                               const PredictorGains& gains);

// CSV export: header t,x1..xn,u1..um,psi1..psin,eps1..epsn,zeta1..zetan,
// z1..zn,xi1..xin, one row per step, 17 significant digits, '.' decimal.
// Written atomically (temp file + rename).
void write_trace_csv(const SimTrace& trace, const std::string& path);

}  // namespace predictorlab
