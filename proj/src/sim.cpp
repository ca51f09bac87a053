#include "predictorlab/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "predictorlab/io.hpp"

namespace predictorlab {

namespace {

void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

// Span must sit on the step grid within relative tolerance 1e-9.
std::size_t steps_on_grid(double span, double h, const char* what) {
  const double ratio = span / h;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, std::abs(ratio))) {
    throw std::invalid_argument(std::string(what) +
                                ": must be an integer multiple of the step h");
  }
  return static_cast<std::size_t>(rounded);
}

void append(std::vector<double>& col, const Vector& v) {
  for (std::size_t i = 0; i < v.dim(); ++i) col.push_back(v[i]);
}

}  // namespace

std::string mode_name(SimMode mode) {
  switch (mode) {
    case SimMode::modified: return "modified";
    case SimMode::classical: return "classical";
    case SimMode::open_loop: return "open_loop";
  }
  return "?";
}

SimMode mode_from_name(const std::string& name) {
  if (name == "modified") return SimMode::modified;
  if (name == "classical") return SimMode::classical;
  if (name == "open_loop") return SimMode::open_loop;
  throw std::invalid_argument("unknown mode '" + name +
                              "' (expected modified|classical|open_loop)");
}

DelayLine::DelayLine(std::size_t width, std::size_t depth)
    : width_(width), depth_(depth), buf_(width * depth, 0.0) {
  require(width > 0, "DelayLine: width must be positive");
}

Vector DelayLine::push_and_read(const Vector& sample) {
  require(sample.dim() == width_, "DelayLine: sample dimension mismatch");
  if (depth_ == 0) return sample;
  Vector out(width_);
  double* slot = buf_.data() + cursor_ * width_;
  for (std::size_t i = 0; i < width_; ++i) {
    out[i] = slot[i];
    slot[i] = sample[i];
  }
  cursor_ = (cursor_ + 1) % depth_;
  return out;
}

Vector SimTrace::col_at(const std::vector<double>& col, std::size_t w,
                        std::size_t k) {
  Vector v(w);
  for (std::size_t i = 0; i < w; ++i) v[i] = col[k * w + i];
  return v;
}

SimTrace simulate_closed_loop(const Plant& plant, const PredictorGains& gains,
                              const SimConfig& config, SimMode mode) {
  gains.check_dimensions(plant);
  require(config.h > 0.0 && std::isfinite(config.h), "SimConfig: h must be > 0");
  require(config.t_end >= 0.0 && std::isfinite(config.t_end),
          "SimConfig: t_end must be finite and >= 0");
  require(config.x0.dim() == plant.n(), "SimConfig: x0 dimension mismatch");

  const std::size_t n = plant.n(), m = plant.m();
  const double h = config.h;
  const std::size_t r_delay = steps_on_grid(plant.D, h, "plant.D");
  const std::size_t r_period = steps_on_grid(gains.T, h, "gains.T");
  require(r_period >= 1, "gains.T: must be at least one step");

  SimTrace tr;
  tr.h = h;
  tr.D = plant.D;
  tr.T = gains.T;
  tr.mode = mode;
  tr.n = n;
  tr.m = m;
  tr.r_delay = r_delay;
  tr.r_period = r_period;
  if (config.t_end < plant.D + 2.0 * gains.T) {
    tr.warnings.push_back("t_end < D + 2T: horizon too short for recursion checks");
  }

  const std::size_t last = static_cast<std::size_t>(
      std::floor(config.t_end / h + 1e-9));
  tr.t.reserve(last + 1);
  tr.x.reserve((last + 1) * n);
  tr.u.reserve((last + 1) * m);
  tr.psi.reserve((last + 1) * n);
  tr.eps.reserve((last + 1) * n);
  tr.zeta.reserve((last + 1) * n);

  const Matrix expAD = expm(plant.A, plant.D);  // cached once per run
  DelayLine line_x(n, r_delay), line_psi(n, r_delay), line_eps(n, r_delay),
      line_u(m, r_delay);

  Vector x = config.x0;
  ControllerState cs(n);
  const Vector zero_n(n), zero_m(m);

  for (std::size_t k = 0; k <= last; ++k) {
    // (a) reset on the exact step grid (equivalent to the half-step time rule
    // since T = r_period * h); classical mode keeps eps identically zero.
    if (mode != SimMode::classical && k % r_period == 0) cs.eps = zero_n;

    // (b)+(g) one push_and_read per line per step: returns the value from
    // r_delay steps ago and stores this step's (pre-advance) value.
    const Vector x_del = line_x.push_and_read(x);
    const Vector psi_del = line_psi.push_and_read(cs.psi);
    const Vector eps_del = line_eps.push_and_read(cs.eps);

    // (c) correction output (algebraic, from the cached e^{AD})
    const Vector zeta =
        (mode == SimMode::classical)
            ? zero_n
            : correction_zeta(plant, x, x_del, psi_del, eps_del, cs.eps, expAD);

    // (d) control output
    const Vector u_now =
        (mode == SimMode::open_loop) ? zero_m : control_output(gains.K, x, cs.psi);
    const Vector u_del = line_u.push_and_read(u_now);

    // (e) record the mutually consistent time-t_k values
    tr.t.push_back(static_cast<double>(k) * h);
    append(tr.x, x);
    append(tr.u, u_now);
    append(tr.psi, cs.psi);
    append(tr.eps, cs.eps);
    append(tr.zeta, zeta);
    if (k == last) break;

    // (f) simultaneous Euler advance from the pre-step values
    const Vector x_next = x + h * (plant.A * x + plant.B * u_del);
    cs = controller_euler_step(plant, gains, cs, u_now, u_del, zeta, h);
    x = x_next;

    const double state_norm =
        std::max({norm(x), norm(cs.psi), norm(cs.eps)});
    if (state_norm > 1e12) {
      tr.diverged = true;
      tr.diverged_at = static_cast<double>(k + 1) * h;
      break;
    }
  }
  return tr;
}

SimTrace& compute_derived_signals(SimTrace& tr, const Plant& plant) {
  require(plant.n() == tr.n, "compute_derived_signals: plant/trace mismatch");
  const std::size_t steps = tr.steps(), n = tr.n, rd = tr.r_delay;

  tr.z.resize(steps * n);
  for (std::size_t i = 0; i < steps * n; ++i) tr.z[i] = tr.zeta[i] + tr.eps[i];

  tr.xi.resize(steps * n);
  for (std::size_t k = 0; k < steps; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const double delayed =
          (k >= rd) ? tr.x[(k - rd) * n + i] + tr.psi[(k - rd) * n + i] : 0.0;
      tr.xi[k * n + i] = tr.x[k * n + i] - delayed;
    }
  }

  // Identity xi(t) = e^{-AD} z(t) - eps(t-D): exact algebra whenever zeta is
  // produced by its formula, i.e. every mode except classical.
  const Matrix expBack = expm(plant.A, -tr.D);
  double max_z = 0.0, max_res = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    const Vector zk = tr.z_at(k);
    max_z = std::max(max_z, norm(zk));
    Vector rhs = expBack * zk;
    if (k >= rd) {
      for (std::size_t i = 0; i < n; ++i) rhs[i] -= tr.eps[(k - rd) * n + i];
    }
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = tr.xi[k * n + i] - rhs[i];
      res += d * d;
    }
    max_res = std::max(max_res, std::sqrt(res));
  }
  tr.identity_max_residual = max_res;
  tr.identity_tol = 1e-8 * (1.0 + max_z);
  tr.identity_applicable = (tr.mode != SimMode::classical);
  tr.identity_ok = !tr.identity_applicable || max_res <= tr.identity_tol;
  tr.has_derived = true;
  return tr;
}

// Sorted step indices where zeta/z change discontinuously: t = mT and t = mT+D.
static std::vector<std::size_t> jump_indices(const SimTrace& tr) {
  std::vector<std::size_t> jumps;
  const std::size_t steps = tr.steps();
  for (std::size_t k = 0; k < steps; k += tr.r_period) {
    jumps.push_back(k);
    if (k + tr.r_delay < steps) jumps.push_back(k + tr.r_delay);
  }
  std::sort(jumps.begin(), jumps.end());
  jumps.erase(std::unique(jumps.begin(), jumps.end()), jumps.end());
  return jumps;
}

ResidualReport residual_report(const SimTrace& tr, const Plant& plant,
                               const PredictorGains& gains) {
  require(tr.has_derived, "residual_report: compute_derived_signals first");
  gains.check_dimensions(plant);
  const std::size_t steps = tr.steps();
  ResidualReport rep;
  if (steps < 3) return rep;

  const Matrix H = plant.A - gains.L;
  const Matrix eAh = expm(plant.A, tr.h);
  const double inv2h = 1.0 / (2.0 * tr.h);

  for (std::size_t k = 0; k < steps; ++k) {
    rep.max_zeta_norm = std::max(rep.max_zeta_norm, norm(tr.zeta_at(k)));
    rep.max_z_norm = std::max(rep.max_z_norm, norm(tr.z_at(k)));
  }

  std::vector<std::size_t> jumps = jump_indices(tr);
  jumps.push_back(steps);  // sentinel: treat end-of-trace as an interval edge
  for (std::size_t ji = 0; ji + 1 < jumps.size(); ++ji) {
    const std::size_t a = jumps[ji];
    const std::size_t b = jumps[ji + 1];
    const bool ends_at_jump = (b < steps);
    IntervalResidual iv;
    iv.first = a;
    iv.last = std::min(b - 1, steps - 1);

    // Central differences need k-1 and k+1 on the same smooth branch; the 2
    // samples adjacent to each jump are excluded on both sides.  Signed
    // arithmetic: a short interval makes these windows empty, not wrapped.
    const long long lo = static_cast<long long>(a) + 2;
    const long long hi_fd = static_cast<long long>(ends_at_jump ? b : steps) - 2;
    const long long hi_flow =
        ends_at_jump ? static_cast<long long>(b) - 2
                     : static_cast<long long>(steps) - 1;

    Vector z_prop = tr.z_at(a);
    for (long long k = static_cast<long long>(a) + 1;
         k <= hi_flow && k < static_cast<long long>(steps); ++k) {
      z_prop = eAh * z_prop;
      if (k < lo) continue;
      const double res_flow = norm(tr.z_at(k) - z_prop);
      iv.flow_map = std::max(iv.flow_map, res_flow);
      if (k <= hi_fd) {
        const Vector dzeta = inv2h * (tr.zeta_at(k + 1) - tr.zeta_at(k - 1));
        const Vector dz = inv2h * (tr.z_at(k + 1) - tr.z_at(k - 1));
        iv.zeta_dynamics =
            std::max(iv.zeta_dynamics, norm(dzeta - H * tr.zeta_at(k)));
        iv.z_dynamics =
            std::max(iv.z_dynamics, norm(dz - plant.A * tr.z_at(k)));
        ++iv.samples;
      }
    }
    rep.max_zeta_dynamics = std::max(rep.max_zeta_dynamics, iv.zeta_dynamics);
    rep.max_z_dynamics = std::max(rep.max_z_dynamics, iv.z_dynamics);
    rep.max_flow_map = std::max(rep.max_flow_map, iv.flow_map);
    rep.intervals.push_back(iv);
  }
  return rep;
}

void write_trace_csv(const SimTrace& tr, const std::string& path) {
  require(tr.has_derived, "write_trace_csv: compute_derived_signals first");
  const std::string tmp = path + ".tmp";
  std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + tmp);

  auto col_headers = [&](const char* base, std::size_t w) {
    std::string s;
    for (std::size_t i = 1; i <= w; ++i)
      s += "," + std::string(base) + std::to_string(i);
    return s;
  };
  out << "t" << col_headers("x", tr.n) << col_headers("u", tr.m)
      << col_headers("psi", tr.n) << col_headers("eps", tr.n)
      << col_headers("zeta", tr.n) << col_headers("z", tr.n)
      << col_headers("xi", tr.n) << "\n";

  char buf[40];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), ",%.17g", v);
    out << buf;
  };
  const std::size_t steps = tr.steps(), n = tr.n, m = tr.m;
  for (std::size_t k = 0; k < steps; ++k) {
    std::snprintf(buf, sizeof(buf), "%.17g", tr.t[k]);
    out << buf;
    for (std::size_t i = 0; i < n; ++i) put(tr.x[k * n + i]);
    for (std::size_t i = 0; i < m; ++i) put(tr.u[k * m + i]);
    for (std::size_t i = 0; i < n; ++i) put(tr.psi[k * n + i]);
    for (std::size_t i = 0; i < n; ++i) put(tr.eps[k * n + i]);
    for (std::size_t i = 0; i < n; ++i) put(tr.zeta[k * n + i]);
    for (std::size_t i = 0; i < n; ++i) put(tr.z[k * n + i]);
    for (std::size_t i = 0; i < n; ++i) put(tr.xi[k * n + i]);
    out << "\n";
  }
  out.flush();
  if (!out) {
    std::remove(tmp.c_str());
    throw IoError("write failed: " + tmp);
  }
  out.close();
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw IoError("rename failed: " + path);
  }
}

}  // namespace predictorlab
