#pragma once

// Plant and controller law for the delay-compensating predictor:
//   plant        x' = A x + B u(t - D)
//   output       u  = K (x + psi)
//   predictor    psi' = A psi + B u(t) - B u(t - D) + L zeta
//   correction   zeta = e^{AD} [x - x(t-D) - psi(t-D) + eps(t-D)] - eps(t)
//   reset integrator  eps' = A eps + L zeta,  eps(mT) = 0 for m = 0, 1, 2, ...
// zeta is an algebraic output, never integrated: its jump behavior at the
// reset/delay instants then comes out automatically, and its ODE between
// jumps is a testable consequence rather than the implementation.

#include <string>
#include <vector>

#include "predictorlab/linalg.hpp"

namespace predictorlab {

struct Plant {
  Matrix A;  // n x n
  Matrix B;  // n x m
  double D;  // input delay, seconds, >= 0

  Plant(Matrix a, Matrix b, double d);
  std::size_t n() const { return A.rows(); }
  std::size_t m() const { return B.cols(); }
};

struct PredictorGains {
  Matrix K;  // m x n feedback gain
  Matrix L;  // n x n correction gain
  double T;  // reset period, seconds

  PredictorGains(Matrix k, Matrix l, double t);
  // Dimension consistency against a plant; throws std::invalid_argument.
  void check_dimensions(const Plant& plant) const;
};

struct ControllerState {
  Vector psi;
  Vector eps;

  explicit ControllerState(std::size_t n) : psi(n), eps(n) {}
  ControllerState(Vector psi_, Vector eps_);
};

// u = K (x + psi).
Vector control_output(const Matrix& K, const Vector& x, const Vector& psi);

// zeta = expAD (x_now - x_del - psi_del + eps_del) - eps_now, with expAD the
// cached e^{AD} (computed once per run, never per step).
Vector correction_zeta(const Plant& plant, const Vector& x_now,
                       const Vector& x_del, const Vector& psi_del,
                       const Vector& eps_del, const Vector& eps_now,
                       const Matrix& expAD);

// One explicit-Euler advance of (psi, eps) from the pre-step values
// (simultaneous update; zeta is the value already computed for this instant).
ControllerState controller_euler_step(const Plant& plant,
                                      const PredictorGains& gains,
                                      const ControllerState& state,
                                      const Vector& u_now, const Vector& u_del,
                                      const Vector& zeta, double h);

struct ResetOutcome {
  ControllerState state;
  bool fired;
};

// eps <- 0 when t lies on the reset grid mT within half a step.
ResetOutcome apply_reset(ControllerState state, double t, double T, double h);

struct ValidationItem {
  std::string name;
  bool pass;
  double value;        // the computed number backing the verdict
  std::string detail;
};

struct ValidationReport {
  bool all_pass = false;
  std::vector<ValidationItem> items;
  HurwitzCertificate f_certificate;  // for F = A + B K
  HurwitzCertificate h_certificate;  // for H = A - L
  double abscissa_A = 0.0;
  double abscissa_H = 0.0;
};

// Four checks: F = A + BK Hurwitz, H = A - L Hurwitz,
// spectral_abscissa(H) + spectral_abscissa(A) < 0, and T > D.
// Failures are report entries, never exceptions.
ValidationReport validate_gains(const Plant& plant, const PredictorGains& gains);

}  // namespace predictorlab
