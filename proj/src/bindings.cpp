#include <optional>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "predictorlab/io.hpp"
#include "predictorlab/scenario.hpp"
#include "predictorlab/stability.hpp"

namespace py = pybind11;
using namespace predictorlab;

namespace {

Matrix matrix_from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty() || rows[0].empty())
    throw std::invalid_argument("matrix must be a non-empty list of rows");
  const std::size_t r = rows.size(), c = rows[0].size();
  std::vector<double> flat;
  flat.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c)
      throw std::invalid_argument("matrix rows must all have the same length");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return Matrix(r, c, flat);
}

std::vector<std::vector<double>> rows_from_matrix(const Matrix& m) {
  std::vector<std::vector<double>> rows(m.rows(), std::vector<double>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) rows[i][j] = m(i, j);
  return rows;
}

// Column-major unpack of a trace block into per-signal lists.
std::vector<std::vector<double>> columns(const std::vector<double>& flat,
                                         std::size_t width) {
  const std::size_t steps = width == 0 ? 0 : flat.size() / width;
  std::vector<std::vector<double>> cols(width, std::vector<double>(steps));
  for (std::size_t k = 0; k < steps; ++k)
    for (std::size_t j = 0; j < width; ++j) cols[j][k] = flat[k * width + j];
  return cols;
}

py::dict trace_to_dict(const SimTrace& trace) {
  py::dict d;
  d["t"] = trace.t;
  d["x"] = columns(trace.x, trace.n);
  d["u"] = columns(trace.u, trace.m);
  d["psi"] = columns(trace.psi, trace.n);
  d["eps"] = columns(trace.eps, trace.n);
  d["zeta"] = columns(trace.zeta, trace.n);
  d["z"] = columns(trace.z, trace.n);
  d["xi"] = columns(trace.xi, trace.n);
  d["mode"] = std::string(mode_name(trace.mode));
  d["h"] = trace.h;
  d["diverged"] = trace.diverged;
  if (trace.diverged) d["diverged_at"] = trace.diverged_at;
  d["identity_applicable"] = trace.identity_applicable;
  d["identity_residual"] = trace.identity_max_residual;
  d["identity_tol"] = trace.identity_tol;
  d["identity_ok"] = trace.identity_ok;
  d["warnings"] = trace.warnings;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Delay-compensating predictor toolkit: linear-algebra kernels, "
            "closed-loop simulation, and reset-period analysis";

  m.def(
      "expm",
      [](const std::vector<std::vector<double>>& a, double t) {
        return rows_from_matrix(expm(matrix_from_rows(a), t));
      },
      py::arg("a"), py::arg("t") = 1.0, "Matrix exponential exp(a * t)");

  m.def(
      "solve_linear",
      [](const std::vector<std::vector<double>>& a, const std::vector<double>& b) {
        const Vector x = solve_linear(matrix_from_rows(a), Vector(b));
        std::vector<double> out(x.dim());
        for (std::size_t i = 0; i < x.dim(); ++i) out[i] = x[i];
        return out;
      },
      py::arg("a"), py::arg("b"), "Solve a x = b by partially pivoted elimination");

  m.def(
      "spectral_radius",
      [](const std::vector<std::vector<double>>& a) {
        return spectral_radius(matrix_from_rows(a));
      },
      py::arg("a"));

  m.def(
      "spectral_abscissa",
      [](const std::vector<std::vector<double>>& a) {
        return spectral_abscissa(matrix_from_rows(a));
      },
      py::arg("a"));

  m.def(
      "operator_norm",
      [](const std::vector<std::vector<double>>& a) {
        return operator_norm(matrix_from_rows(a));
      },
      py::arg("a"));

  m.def(
      "hurwitz_certificate",
      [](const std::vector<std::vector<double>>& a) {
        const HurwitzCertificate cert = hurwitz_certificate(matrix_from_rows(a));
        py::dict d;
        d["is_hurwitz"] = cert.is_hurwitz;
        d["marginal"] = cert.marginal;
        if (cert.has_p) d["p"] = rows_from_matrix(cert.p);
        return d;
      },
      py::arg("a"), "Lyapunov-equation Hurwitz test; includes P when it exists");

  m.def(
      "simulate",
      [](const std::string& scenario_path, std::optional<std::string> mode,
         std::optional<double> t_end, std::optional<double> h) {
        Scenario scenario = parse_scenario_file(scenario_path);
        if (mode) scenario.mode = mode_from_name(*mode);
        if (t_end) scenario.sim.t_end = *t_end;
        if (h) scenario.sim.h = *h;
        SimTrace trace = simulate_closed_loop(scenario.plant, scenario.gains,
                                              scenario.sim, scenario.mode);
        compute_derived_signals(trace, scenario.plant);
        return trace_to_dict(trace);
      },
      py::arg("scenario_path"), py::arg("mode") = std::nullopt,
      py::arg("t_end") = std::nullopt, py::arg("h") = std::nullopt,
      "Run a scenario file; returns every recorded signal as lists");

  m.def(
      "analyze",
      [](const std::string& scenario_path) {
        const Scenario scenario = parse_scenario_file(scenario_path);
        const ValidationReport gains_report =
            validate_gains(scenario.plant, scenario.gains);
        const DiscreteMap map = discrete_map(scenario.plant, scenario.gains);
        const LyapunovCertificate cert = lyapunov_certificate_discrete(map);
        py::dict d;
        d["gains_valid"] = gains_report.all_pass;
        py::dict checks;
        for (const ValidationItem& item : gains_report.items)
          checks[item.name.c_str()] =
              py::make_tuple(item.pass, item.value, item.detail);
        d["checks"] = checks;
        d["g1"] = rows_from_matrix(map.g1);
        d["g2"] = rows_from_matrix(map.g2);
        d["rho"] = map.rho;
        d["spectral_stable"] = map.rho < 1.0;
        d["alpha"] = cert.alpha;
        d["beta"] = cert.beta;
        d["lyapunov_valid"] = cert.valid;
        d["integral_identity_residual"] = integral_identity_residual(
            scenario.plant.A, scenario.gains.L, scenario.plant.D, 10000);
        return d;
      },
      py::arg("scenario_path"),
      "Gain validation plus the discrete-map stability certificates");

  m.def(
      "find_min_stable_T",
      [](const std::string& scenario_path, double t_lo, double t_hi, double t_step,
         const std::string& criterion) {
        const Scenario scenario = parse_scenario_file(scenario_path);
        SweepCriterion crit;
        if (criterion == "spectral") {
          crit = SweepCriterion::spectral;
        } else if (criterion == "lyapunov") {
          crit = SweepCriterion::lyapunov;
        } else {
          throw std::domain_error("criterion must be 'spectral' or 'lyapunov'");
        }
        const SweepResult result =
            find_min_stable_T(scenario.plant, scenario.gains.K, scenario.gains.L,
                              t_lo, t_hi, t_step, crit);
        py::dict d;
        d["found"] = result.found;
        if (result.found) d["min_stable_T"] = result.min_stable_period;
        py::list rows;
        for (const SweepRow& row : result.rows) {
          py::dict r;
          r["T"] = row.period;
          r["rho"] = row.rho;
          r["alpha"] = row.alpha;
          r["beta"] = row.beta;
          r["spectral_stable"] = row.spectral_stable;
          r["lyapunov_valid"] = row.lyapunov_valid;
          rows.append(r);
        }
        d["rows"] = rows;
        return d;
      },
      py::arg("scenario_path"), py::arg("t_lo") = 1.5, py::arg("t_hi") = 40.0,
      py::arg("t_step") = 0.5, py::arg("criterion") = "spectral",
      "Scan reset periods; smallest grid T whose whole suffix satisfies the "
      "criterion");

  py::register_exception<ScenarioError>(m, "ScenarioError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<SingularMatrixError>(m, "SingularMatrixError",
                                              PyExc_ArithmeticError);
}
