#include "predictorlab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "predictorlab/io.hpp"

namespace predictorlab {

DiscreteMap discrete_map(const Plant& plant, const PredictorGains& gains) {
  gains.check_dimensions(plant);
  const double t_period = gains.T;
  const double d = plant.D;
  if (!(t_period > d)) {
    throw std::domain_error(
        "reset period T must exceed the delay D (T > D) for the discrete map");
  }
  const std::size_t n = plant.n();
  const Matrix h = plant.A - gains.L;

  // Order matters: H and A do not commute in general.
  const Matrix e_h_td = expm(h, t_period - d);
  const Matrix g1 = -1.0 * (e_h_td * expm(plant.A, d));
  const Matrix g2 =
      e_h_td * expm(plant.A, d + t_period) - expm(h, t_period) * expm(plant.A, t_period);

  Matrix companion(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    companion(i, n + i) = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      companion(n + i, j) = -g2(i, j);
      companion(n + i, n + j) = -g1(i, j);
    }
  }

  DiscreteMap map;
  map.g1 = g1;
  map.g2 = g2;
  map.companion = companion;
  map.rho = spectral_radius(companion);
  map.period = t_period;
  map.delay = d;
  return map;
}

double integral_identity_residual(const Matrix& a, const Matrix& l, double s_max,
                                  std::size_t quad_steps) {
  if (!a.square() || !l.square() || a.rows() != l.rows())
    throw std::invalid_argument("integral_identity_residual: A and L must be square "
                                "with matching dimension");
  if (!(s_max > 0.0) || !std::isfinite(s_max))
    throw std::invalid_argument("integral_identity_residual: s_max must be positive");
  if (quad_steps < 1000)
    throw std::invalid_argument("integral_identity_residual: quad_steps must be >= 1000");
  if (quad_steps % 2 != 0) ++quad_steps;

  const std::size_t n = a.rows();
  const Matrix h = a - l;
  const double ds = s_max / static_cast<double>(quad_steps);

  auto integrand = [&](double s) { return expm(h, -s) * (l * expm(a, s)); };

  // Composite Simpson over quad_steps (even) subintervals.
  Matrix acc = integrand(0.0) + integrand(s_max);
  for (std::size_t j = 1; j < quad_steps; ++j) {
    const double w = (j % 2 == 1) ? 4.0 : 2.0;
    acc = acc + w * integrand(ds * static_cast<double>(j));
  }
  const Matrix quad = (ds / 3.0) * acc;

  const Matrix closed = expm(h, -s_max) * expm(a, s_max) - Matrix::identity(n);
  return frobenius_norm(quad - closed);
}

LyapunovCertificate lyapunov_certificate_discrete(const DiscreteMap& map) {
  const std::size_t n = map.g1.rows();
  const Matrix g1t = transpose(map.g1);
  const Matrix g2t = transpose(map.g2);
  const Matrix n11 = g2t * map.g2;
  const Matrix n12 = g2t * map.g1;
  const Matrix n21 = g1t * map.g2;
  const Matrix n22 = g1t * map.g1;

  Matrix big_n(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      big_n(i, j) = 2.0 * n11(i, j);
      big_n(i, n + j) = 2.0 * n12(i, j);
      big_n(n + i, j) = 2.0 * n21(i, j);
      big_n(n + i, n + j) = 2.0 * n22(i, j);
    }
  }

  LyapunovCertificate cert;
  cert.n = big_n;
  cert.alpha = operator_norm(big_n);
  cert.beta = (1.0 + cert.alpha) / 2.0;
  Matrix p(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    p(i, i) = 1.0;
    p(n + i, n + i) = 2.0;
  }
  cert.p = p;
  cert.valid = cert.alpha < 1.0;
  return cert;
}

SweepResult find_min_stable_T(const Plant& plant, const Matrix& k_gain,
                              const Matrix& l_gain, double t_lo, double t_hi,
                              double t_step, SweepCriterion criterion) {
  if (!(t_step > 0.0) || !(t_hi >= t_lo) || !std::isfinite(t_lo) ||
      !std::isfinite(t_hi) || !std::isfinite(t_step))
    throw std::domain_error("sweep grid requires t_lo <= t_hi and t_step > 0");
  if (!(t_lo > plant.D))
    throw std::domain_error("sweep grid must start above the delay: t_lo > D");

  SweepResult result;
  const std::size_t count =
      static_cast<std::size_t>(std::floor((t_hi - t_lo) / t_step + 1e-9)) + 1;
  result.rows.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double t_period = t_lo + t_step * static_cast<double>(i);
    const PredictorGains gains(k_gain, l_gain, t_period);
    const DiscreteMap map = discrete_map(plant, gains);
    const LyapunovCertificate cert = lyapunov_certificate_discrete(map);
    SweepRow row;
    row.period = t_period;
    row.rho = map.rho;
    row.alpha = cert.alpha;
    row.beta = cert.beta;
    row.spectral_stable = map.rho < 1.0;
    row.lyapunov_valid = cert.valid;
    result.rows.push_back(row);
  }

  // Smallest grid point from which the criterion holds at every larger one.
  std::size_t first_good = result.rows.size();
  for (std::size_t i = result.rows.size(); i-- > 0;) {
    const bool ok = criterion == SweepCriterion::spectral
                        ? result.rows[i].spectral_stable
                        : result.rows[i].lyapunov_valid;
    if (!ok) break;
    first_good = i;
  }
  if (first_good < result.rows.size()) {
    result.found = true;
    result.min_stable_period = result.rows[first_good].period;
  }
  return result;
}

void write_sweep_csv(const SweepResult& result, const std::string& path) {
  std::ostringstream out;
  out << "T,rho,alpha,beta,spectral_stable,lyapunov_valid\n";
  for (const SweepRow& row : result.rows) {
    out << g17(row.period) << ',' << g17(row.rho) << ',' << g17(row.alpha) << ','
        << g17(row.beta) << ',' << (row.spectral_stable ? 1 : 0) << ','
        << (row.lyapunov_valid ? 1 : 0) << '\n';
  }
  write_file_atomic(path, out.str());
}

XiSequence xi_recursion_check(const SimTrace& trace, const Plant& plant,
                              const PredictorGains& gains) {
  if (trace.mode != SimMode::modified)
    throw std::invalid_argument("xi recursion check requires the modified mode");
  if (!trace.has_derived)
    throw std::invalid_argument("xi recursion check requires derived signals");
  const double needed = plant.D + 3.0 * gains.T;
  const double t_end = trace.t.back();
  if (t_end + 1e-12 < needed) {
    std::ostringstream msg;
    msg << "xi recursion check needs t_end >= D + 3T = " << needed << ", got "
        << t_end;
    throw std::invalid_argument(msg.str());
  }

  const DiscreteMap map = discrete_map(plant, gains);
  XiSequence seq;
  const std::size_t last = trace.steps() - 1;
  for (std::size_t m = 0;; ++m) {
    const std::size_t k = m * trace.r_period + trace.r_delay;
    if (k > last) break;
    seq.samples.push_back(trace.xi_at(k));
  }
  for (const Vector& s : seq.samples)
    seq.max_sample_norm = std::max(seq.max_sample_norm, norm(s));

  double max_abs_residual = 0.0;
  for (std::size_t m = 1; m + 1 < seq.samples.size(); ++m) {
    const Vector e = seq.samples[m + 1] + map.g1 * seq.samples[m] +
                     map.g2 * seq.samples[m - 1];
    seq.residual_norms.push_back(norm(e));
    max_abs_residual = std::max(max_abs_residual, norm(e));
  }
  seq.max_rel_residual =
      seq.max_sample_norm > 0.0 ? max_abs_residual / seq.max_sample_norm : 0.0;
  return seq;
}

SequenceCheck lyapunov_sequence_check(const XiSequence& xi,
                                      const LyapunovCertificate& cert) {
  SequenceCheck check;
  if (!cert.valid) {
    check.applicable = false;
    check.note = "condition not applicable";
    return check;
  }
  check.applicable = true;
  for (std::size_t m = 1; m < xi.samples.size(); ++m) {
    const double v = norm(xi.samples[m - 1]) * norm(xi.samples[m - 1]) +
                     2.0 * norm(xi.samples[m]) * norm(xi.samples[m]);
    check.values.push_back(v);
  }
  if (check.values.size() < 2) {
    check.pass = true;
    check.note = "fewer than two lifted samples; decrease vacuously holds";
    return check;
  }
  const double tol_abs = 1e-9 * check.values.front();
  check.pass = true;
  for (std::size_t m = 0; m + 1 < check.values.size(); ++m) {
    if (check.values[m] > 0.0)
      check.worst_ratio = std::max(check.worst_ratio,
                                   check.values[m + 1] / check.values[m]);
    if (check.values[m + 1] > cert.beta * check.values[m] + tol_abs)
      check.pass = false;
  }
  return check;
}

EnvelopeCheck z_envelope_check(const SimTrace& trace, const Plant& plant,
                               const PredictorGains& gains) {
  if (!trace.has_derived)
    throw std::invalid_argument("envelope check requires derived signals");

  EnvelopeCheck check;
  const double h = trace.h;
  const std::size_t r_period = trace.r_period;
  const std::size_t r_delay = trace.r_delay;

  // E = max over the offsets actually visited of ||exp(A s)||, s in [0, T).
  const Matrix e_ah = expm(plant.A, h);
  double envelope = 1.0;
  {
    Matrix phi = Matrix::identity(plant.n());
    for (std::size_t j = 0; j < r_period; ++j) {
      envelope = std::max(envelope, operator_norm(phi));
      phi = e_ah * phi;
    }
  }
  if (r_period < 100) {
    for (int j = 0; j < 100; ++j) {
      const double s = gains.T * static_cast<double>(j) / 100.0;
      envelope = std::max(envelope, operator_norm(expm(plant.A, s)));
    }
  }
  check.envelope = envelope;

  double max_z = 0.0;
  for (std::size_t k = 0; k < trace.steps(); ++k)
    max_z = std::max(max_z, norm(trace.z_at(k)));
  check.tol_abs = 1e-3 * max_z * std::max(1.0, h / 1e-4);

  check.pass = true;
  check.worst_margin = 0.0;
  const std::size_t last = trace.steps() - 1;
  for (std::size_t m = 0;; ++m) {
    const std::size_t anchor = m * r_period + r_delay;
    if (anchor > last) break;
    const double base = envelope * norm(trace.z_at(anchor)) * (1.0 + 1e-6);
    const std::size_t stop = std::min(anchor + r_period, last + 1);
    for (std::size_t k = anchor; k < stop; ++k) {
      const double margin = base + check.tol_abs - norm(trace.z_at(k));
      if (margin < check.worst_margin) check.worst_margin = margin;
      if (margin < 0.0) check.pass = false;
    }
  }
  return check;
}

}  // namespace predictorlab
