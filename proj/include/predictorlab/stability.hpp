#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "predictorlab/linalg.hpp"
#include "predictorlab/model.hpp"
#include "predictorlab/sim.hpp"

namespace predictorlab {

// One-reset-period return map of the prediction error xi(t) = x(t) - x(t-D) - psi(t-D),
// sampled at t = mT + D:  xi_{m+1} + G1 xi_m + G2 xi_{m-1} = 0.
struct DiscreteMap {
  Matrix g1;
  Matrix g2;
  Matrix companion;  // [[0, I], [-G2, -G1]], acts on col(xi_{m-1}, xi_m)
  double rho = 0.0;  // spectral radius of the companion matrix
  double period = 0.0;
  double delay = 0.0;
};

// Requires T > D: the correction needs a full delay's worth of history per period.
DiscreteMap discrete_map(const Plant& plant, const PredictorGains& gains);

// Frobenius residual of the closed form for int_0^s exp(-H s) L exp(A s) ds
// with H = A - L, checked against composite-Simpson quadrature.
// quad_steps must be >= 1000 (rounded up to even).
double integral_identity_residual(const Matrix& a, const Matrix& l, double s_max,
                                  std::size_t quad_steps);

// Quadratic certificate for the two-step recursion, in the lifted variable
// chi_m = col(xi_{m-1}, xi_m):  V = chi' P chi with P = diag(I, 2I).
// Valid (geometric decrease with ratio beta) iff alpha = ||N|| < 1.
struct LyapunovCertificate {
  Matrix n;
  double alpha = 0.0;
  double beta = 0.0;
  Matrix p;
  bool valid = false;
};

LyapunovCertificate lyapunov_certificate_discrete(const DiscreteMap& map);

enum class SweepCriterion { spectral, lyapunov };

struct SweepRow {
  double period = 0.0;
  double rho = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  bool spectral_stable = false;
  bool lyapunov_valid = false;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  bool found = false;
  double min_stable_period = 0.0;  // meaningful only when found
};

// Scans T over [t_lo, t_hi] with step t_step and returns the smallest grid T
// from which the chosen criterion holds for every larger grid value (suffix
// quantifier: an isolated stable point below an unstable one does not count).
SweepResult find_min_stable_T(const Plant& plant, const Matrix& k_gain,
                              const Matrix& l_gain, double t_lo, double t_hi,
                              double t_step, SweepCriterion criterion);

void write_sweep_csv(const SweepResult& result, const std::string& path);

// xi(mT + D) extracted from a simulated trace, plus the recursion defect
// e_m = xi_{m+1} + G1 xi_m + G2 xi_{m-1} for every interior m.
struct XiSequence {
  std::vector<Vector> samples;  // samples[m] = xi(mT + D), m = 0, 1, ...
  std::vector<double> residual_norms;  // ||e_m|| for m = 1 .. samples-2
  double max_rel_residual = 0.0;       // max ||e_m|| / max_k ||xi_k||
  double max_sample_norm = 0.0;
};

XiSequence xi_recursion_check(const SimTrace& trace, const Plant& plant,
                              const PredictorGains& gains);

// Per-period decrease of V(m) = ||xi_{m-1}||^2 + 2 ||xi_m||^2 against beta.
struct SequenceCheck {
  bool applicable = false;
  bool pass = false;
  std::vector<double> values;  // V(m) for m = 1 .. samples-1
  double worst_ratio = 0.0;
  std::string note;
};

SequenceCheck lyapunov_sequence_check(const XiSequence& xi,
                                      const LyapunovCertificate& cert);

// Between consecutive correction events z evolves by the plant flow, so
// ||z(t)|| <= E ||z(mT + D)|| on [mT + D, mT + D + T) with
// E = max_{0 <= s < T} ||exp(A s)||.
struct EnvelopeCheck {
  bool pass = false;
  double envelope = 0.0;    // E
  double worst_margin = 0.0;  // most negative (bound - ||z||), 0 if never exceeded
  double tol_abs = 0.0;
};

EnvelopeCheck z_envelope_check(const SimTrace& trace, const Plant& plant,
                               const PredictorGains& gains);

}  // namespace predictorlab
