#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "predictorlab/sim.hpp"

using namespace predictorlab;

namespace {

Plant reference_plant() {
  return Plant(Matrix{{0.0, 1.0}, {0.1, 0.0}}, Matrix{{0.0}, {1.0}}, 1.0);
}

PredictorGains reference_gains() {
  return PredictorGains(Matrix{{-20.0, -30.0}}, Matrix{{2.0, 0.5}, {3.0, 0.0}}, 5.0);
}

SimConfig coarse_config(double t_end, double h = 1e-3) {
  return SimConfig{h, t_end, Vector({-1.0, 1.0})};
}

SimTrace run_reference(double t_end, double h = 1e-3,
                       SimMode mode = SimMode::modified) {
  const Plant p = reference_plant();
  SimTrace tr = simulate_closed_loop(p, reference_gains(), coarse_config(t_end, h), mode);
  compute_derived_signals(tr, p);
  return tr;
}

}  // namespace

TEST_CASE("delay line: ring semantics and fill") {
  DelayLine d3(1, 3);
  CHECK(d3.push_and_read(Vector({1.0}))[0] == 0.0);
  CHECK(d3.push_and_read(Vector({2.0}))[0] == 0.0);
  CHECK(d3.push_and_read(Vector({3.0}))[0] == 0.0);
  CHECK(d3.push_and_read(Vector({4.0}))[0] == 1.0);

  DelayLine d0(2, 0);
  const Vector s({5.0, 6.0});
  const Vector out = d0.push_and_read(s);
  CHECK(out[0] == 5.0);
  CHECK(out[1] == 6.0);

  DelayLine d2(1, 2);
  CHECK(d2.push_and_read(Vector({7.0}))[0] == 0.0);
  CHECK(d2.push_and_read(Vector({8.0}))[0] == 0.0);
  CHECK(d2.push_and_read(Vector({7.0}))[0] == 7.0);
  CHECK(d2.push_and_read(Vector({8.0}))[0] == 8.0);

  CHECK_THROWS_AS(d2.push_and_read(Vector({1.0, 2.0})), std::invalid_argument);
}

TEST_CASE("step alignment is enforced at run start") {
  const Plant p = reference_plant();
  const PredictorGains g = reference_gains();
  // D/h not an integer.
  CHECK_THROWS_AS(
      simulate_closed_loop(p, g, SimConfig{3e-4, 1.0, Vector(2)}, SimMode::modified),
      std::invalid_argument);
  // T/h not an integer (T = 0.5 h * odd).
  const PredictorGains bad_t(Matrix{{-20.0, -30.0}}, Matrix{{2.0, 0.5}, {3.0, 0.0}},
                             5.00005);
  CHECK_THROWS_AS(
      simulate_closed_loop(p, bad_t, SimConfig{1e-3, 1.0, Vector(2)}, SimMode::modified),
      std::invalid_argument);
}

TEST_CASE("zero equilibrium stays identically zero") {
  const Plant p = reference_plant();
  SimTrace tr = simulate_closed_loop(p, reference_gains(),
                                     SimConfig{1e-3, 8.0, Vector(2)},
                                     SimMode::modified);
  compute_derived_signals(tr, p);
  for (double v : tr.x) CHECK(v == 0.0);
  for (double v : tr.u) CHECK(v == 0.0);
  for (double v : tr.psi) CHECK(v == 0.0);
  for (double v : tr.eps) CHECK(v == 0.0);
  for (double v : tr.zeta) CHECK(v == 0.0);
  for (double v : tr.z) CHECK(v == 0.0);
  for (double v : tr.xi) CHECK(v == 0.0);
  CHECK(tr.identity_max_residual == 0.0);

  const ResidualReport rep = residual_report(tr, p, reference_gains());
  CHECK(rep.max_zeta_dynamics == 0.0);
  CHECK(rep.max_z_dynamics == 0.0);
  CHECK(rep.max_flow_map == 0.0);
}

TEST_CASE("timestamps are k*h by multiplication; records at resets have eps = 0") {
  const SimTrace tr = run_reference(12.0);
  for (std::size_t k : {std::size_t(0), std::size_t(1), std::size_t(4999),
                        std::size_t(12000)}) {
    CHECK(tr.t[k] == static_cast<double>(k) * tr.h);
  }
  // Resets at t = 0, 5, 10 on the 1e-3 grid.
  for (std::size_t k = 0; k < tr.steps(); k += tr.r_period) {
    CHECK(tr.eps[k * tr.n] == 0.0);
    CHECK(tr.eps[k * tr.n + 1] == 0.0);
  }
  // eps is genuinely nonzero away from resets (the reset is observable).
  double max_eps = 0.0;
  for (double v : tr.eps) max_eps = std::max(max_eps, std::abs(v));
  CHECK(max_eps > 1e-3);
}

TEST_CASE("determinism: identical inputs give bitwise-identical traces") {
  const SimTrace a = run_reference(6.0);
  const SimTrace b = run_reference(6.0);
  CHECK(a.x == b.x);
  CHECK(a.u == b.u);
  CHECK(a.psi == b.psi);
  CHECK(a.eps == b.eps);
  CHECK(a.zeta == b.zeta);
  CHECK(a.z == b.z);
  CHECK(a.xi == b.xi);
}

TEST_CASE("z = zeta + eps exactly; xi/z identity holds to tolerance") {
  const SimTrace tr = run_reference(12.0);
  for (std::size_t i = 0; i < tr.z.size(); ++i)
    CHECK(tr.z[i] == tr.zeta[i] + tr.eps[i]);
  CHECK(tr.identity_applicable);
  CHECK(tr.identity_ok);
  CHECK(tr.identity_max_residual <= tr.identity_tol);
  // The identity is exact algebra: the residual is roundoff, far below tol.
  CHECK(tr.identity_max_residual <= 1e-10);
}

TEST_CASE("zeta is smooth between jumps and its dynamics residual is O(h)") {
  const SimTrace tr = run_reference(12.0, 1e-3);
  const Plant p = reference_plant();
  const PredictorGains g = reference_gains();

  // Per-step increments away from the jump grid stay O(h).
  double max_smooth_inc = 0.0, max_zeta = 0.0;
  for (std::size_t k = 0; k + 1 < tr.steps(); ++k) {
    const bool near_jump = (k % tr.r_period == 0) || ((k + 1) % tr.r_period == 0) ||
                           (k % tr.r_period == tr.r_delay) ||
                           ((k + 1) % tr.r_period == tr.r_delay);
    max_zeta = std::max(max_zeta, norm(tr.zeta_at(k)));
    if (near_jump) continue;
    max_smooth_inc = std::max(max_smooth_inc, norm(tr.zeta_at(k + 1) - tr.zeta_at(k)));
  }
  CHECK(max_smooth_inc <= 30.0 * tr.h * std::max(1.0, max_zeta));

  // First-order convergence of the correction-dynamics residual.
  const ResidualReport r1 = residual_report(tr, p, g);
  SimTrace tr2 = run_reference(12.0, 5e-4);
  const ResidualReport r2 = residual_report(tr2, p, g);
  CHECK(r1.max_zeta_dynamics <= 5e-2);
  CHECK(r1.max_zeta_dynamics / r2.max_zeta_dynamics ==
        doctest::Approx(2.0).epsilon(0.25));
  CHECK(r1.max_z_dynamics / r2.max_z_dynamics == doctest::Approx(2.0).epsilon(0.25));
}

TEST_CASE("global trace difference between h and h/2 scales ~ h") {
  auto sup_diff = [](const SimTrace& coarse, const SimTrace& fine) {
    double d = 0.0;
    for (std::size_t k = 0; k < coarse.steps(); ++k)
      d = std::max(d, norm(coarse.x_at(k) - fine.x_at(2 * k)));
    return d;
  };
  const SimTrace t1 = run_reference(8.0, 1e-3);
  const SimTrace t2 = run_reference(8.0, 5e-4);
  const SimTrace t3 = run_reference(8.0, 2.5e-4);
  const double d12 = sup_diff(t1, t2);
  const double d23 = sup_diff(t2, t3);
  CHECK(d12 > 0.0);
  CHECK(d23 <= 0.75 * d12);  // at least first-order
}

TEST_CASE("classical mode: x + psi contracts under A + BK while x drifts") {
  const Plant p = reference_plant();
  const PredictorGains g = reference_gains();
  SimTrace tr = simulate_closed_loop(p, g, coarse_config(5.0), SimMode::classical);
  compute_derived_signals(tr, p);

  for (double v : tr.zeta) CHECK(v == 0.0);
  for (double v : tr.eps) CHECK(v == 0.0);
  CHECK_FALSE(tr.identity_applicable);

  // dp/dt ~ (A + BK) p to O(h), independent of the delay.
  const Matrix f = p.A + p.B * g.K;
  double max_res = 0.0, max_p = 0.0;
  for (std::size_t k = 1; k + 1 < tr.steps(); ++k) {
    const Vector pk = tr.x_at(k) + tr.psi_at(k);
    const Vector fd =
        (1.0 / (2.0 * tr.h)) * (tr.x_at(k + 1) + tr.psi_at(k + 1) -
                                (tr.x_at(k - 1) + tr.psi_at(k - 1)));
    max_res = std::max(max_res, norm(fd - f * pk));
    max_p = std::max(max_p, norm(pk));
  }
  // Central differences of a forward-Euler sequence leave -(h/2) F^2 p exactly.
  CHECK(max_res <= 0.6 * tr.h * frobenius_norm(f * f) * std::max(1.0, max_p));

  // Hidden instability: the combination decays, the state itself does not.
  const std::size_t last = tr.steps() - 1;
  CHECK(norm(tr.x_at(last) + tr.psi_at(last)) < 1e-1);
  CHECK(norm(tr.x_at(last)) > norm(tr.x_at(0)));
}

TEST_CASE("open-loop mode: u is forced to zero, machinery still runs") {
  SimTrace tr = run_reference(7.0, 1e-3, SimMode::open_loop);
  for (double v : tr.u) CHECK(v == 0.0);
  CHECK(tr.identity_applicable);
  CHECK(tr.identity_ok);
  double max_zeta = 0.0;
  for (double v : tr.zeta) max_zeta = std::max(max_zeta, std::abs(v));
  CHECK(max_zeta > 0.0);  // correction output computed from its formula
}

TEST_CASE("divergence guard stops the run with a partial trace") {
  const Plant p(Matrix{{10.0}}, Matrix{{1.0}}, 0.1);
  const PredictorGains g(Matrix{{0.0}}, Matrix{{0.0}}, 1.0);
  SimTrace tr = simulate_closed_loop(p, g, SimConfig{1e-3, 10.0, Vector({1.0})},
                                     SimMode::open_loop);
  CHECK(tr.diverged);
  CHECK(tr.diverged_at > 2.0);
  CHECK(tr.diverged_at < 3.5);  // e^{10 t} crosses 1e12 near t = 2.8
  CHECK(tr.steps() < 10001);
  CHECK(tr.steps() > 2000);
  // Every recorded value is below the guard.
  for (double v : tr.x) CHECK(std::abs(v) <= 1e12);
}

TEST_CASE("trace CSV: schema, determinism, atomicity") {
  SimTrace tr = run_reference(2.0, 1e-2);
  const std::string path = "/tmp/predictorlab_test_trace.csv";
  write_trace_csv(tr, path);
  write_trace_csv(tr, path);  // second write must land identically

  std::ifstream in(path);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,x1,x2,u1,psi1,psi2,eps1,eps2,zeta1,zeta2,z1,z2,xi1,xi2");
  std::size_t rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++rows;
    // 1 + n + m + 5n comma-separated fields
    const std::size_t commas = std::count(line.begin(), line.end(), ',');
    CHECK(commas == 13);
  }
  CHECK(rows == tr.steps());
  // No temp residue left behind by the write-then-rename.
  CHECK_FALSE(std::ifstream(path + ".tmp").good());
  std::remove(path.c_str());
}

TEST_CASE("mode names round-trip") {
  for (SimMode mode : {SimMode::modified, SimMode::classical, SimMode::open_loop})
    CHECK(mode_from_name(mode_name(mode)) == mode);
  CHECK_THROWS_AS(mode_from_name("sideways"), std::invalid_argument);
}
