#include "predictorlab/model.hpp"

#include <cmath>
#include <sstream>

namespace predictorlab {

namespace {

void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

Plant::Plant(Matrix a, Matrix b, double d)
    : A(std::move(a)), B(std::move(b)), D(d) {
  require(A.square(), "Plant: A must be square");
  require(B.rows() == A.rows(), "Plant: rows(B) must equal rows(A)");
  require(B.cols() > 0, "Plant: B must have at least one column");
  require(std::isfinite(D) && D >= 0.0, "Plant: delay D must be finite and >= 0");
}

PredictorGains::PredictorGains(Matrix k, Matrix l, double t)
    : K(std::move(k)), L(std::move(l)), T(t) {
  require(K.rows() > 0 && K.cols() > 0, "PredictorGains: K must be non-empty");
  require(L.square(), "PredictorGains: L must be square");
  require(std::isfinite(T) && T > 0.0, "PredictorGains: T must be finite and > 0");
}

void PredictorGains::check_dimensions(const Plant& plant) const {
  require(K.cols() == plant.n(), "PredictorGains: cols(K) must equal n");
  require(K.rows() == plant.m(), "PredictorGains: rows(K) must equal cols(B)");
  require(L.rows() == plant.n(), "PredictorGains: L must be n x n");
}

ControllerState::ControllerState(Vector psi_, Vector eps_)
    : psi(std::move(psi_)), eps(std::move(eps_)) {
  require(psi.dim() == eps.dim(), "ControllerState: psi/eps dimension mismatch");
}

Vector control_output(const Matrix& K, const Vector& x, const Vector& psi) {
  return K * (x + psi);
}

Vector correction_zeta(const Plant& plant, const Vector& x_now,
                       const Vector& x_del, const Vector& psi_del,
                       const Vector& eps_del, const Vector& eps_now,
                       const Matrix& expAD) {
  const std::size_t n = plant.n();
  require(x_now.dim() == n && x_del.dim() == n && psi_del.dim() == n &&
              eps_del.dim() == n && eps_now.dim() == n,
          "correction_zeta: vector dimension mismatch");
  require(expAD.rows() == n && expAD.cols() == n,
          "correction_zeta: expAD dimension mismatch");
  return expAD * (x_now - x_del - psi_del + eps_del) - eps_now;
}

ControllerState controller_euler_step(const Plant& plant,
                                      const PredictorGains& gains,
                                      const ControllerState& state,
                                      const Vector& u_now, const Vector& u_del,
                                      const Vector& zeta, double h) {
  gains.check_dimensions(plant);
  require(h > 0.0, "controller_euler_step: h must be > 0");
  require(u_now.dim() == plant.m() && u_del.dim() == plant.m(),
          "controller_euler_step: input dimension mismatch");
  const Vector l_zeta = gains.L * zeta;
  const Vector psi_dot =
      plant.A * state.psi + plant.B * u_now - plant.B * u_del + l_zeta;
  const Vector eps_dot = plant.A * state.eps + l_zeta;
  return ControllerState(state.psi + h * psi_dot, state.eps + h * eps_dot);
}

ResetOutcome apply_reset(ControllerState state, double t, double T, double h) {
  const double nearest = std::round(t / T) * T;
  const bool fire = std::abs(t - nearest) < h / 2.0;
  if (fire) state.eps = Vector(state.eps.dim());
  return {std::move(state), fire};
}

ValidationReport validate_gains(const Plant& plant, const PredictorGains& gains) {
  gains.check_dimensions(plant);
  ValidationReport rep;

  const Matrix f = plant.A + plant.B * gains.K;
  const Matrix h = plant.A - gains.L;
  rep.f_certificate = hurwitz_certificate(f);
  rep.h_certificate = hurwitz_certificate(h);
  rep.abscissa_A = spectral_abscissa(plant.A);
  rep.abscissa_H = spectral_abscissa(h);
  const double sum = rep.abscissa_H + rep.abscissa_A;

  rep.items.push_back({"closed_loop_hurwitz", rep.f_certificate.is_hurwitz, 0.0,
                       rep.f_certificate.is_hurwitz
                           ? "A + BK admits a Lyapunov certificate"
                           : (rep.f_certificate.marginal
                                  ? "A + BK is marginal (eigenvalue pair sums to zero)"
                                  : "A + BK is not Hurwitz")});
  rep.items.push_back({"correction_hurwitz", rep.h_certificate.is_hurwitz, 0.0,
                       rep.h_certificate.is_hurwitz
                           ? "A - L admits a Lyapunov certificate"
                           : (rep.h_certificate.marginal
                                  ? "A - L is marginal (eigenvalue pair sums to zero)"
                                  : "A - L is not Hurwitz")});
  rep.items.push_back({"abscissa_sum", sum < 0.0, sum,
                       "spectral_abscissa(A - L) + spectral_abscissa(A) = " + fmt(sum)});
  rep.items.push_back({"reset_period", gains.T > plant.D, gains.T - plant.D,
                       "T - D = " + fmt(gains.T - plant.D) + " (must be > 0)"});

  rep.all_pass = true;
  for (const auto& item : rep.items) rep.all_pass = rep.all_pass && item.pass;
  return rep;
}

}  // namespace predictorlab
