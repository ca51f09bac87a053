#pragma once

// Test-only oracles, deliberately independent of the library's kernels:
// closed forms and classic root-finders small enough to audit by eye.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace oracles {

// e^{At} for the special family A^2 = c*I with c > 0:
//   e^{At} = cosh(sqrt(c) t) I + sinh(sqrt(c) t)/sqrt(c) * A.
// Returns the 2x2 result row-major.
inline std::array<double, 4> expm_hyperbolic_2x2(const std::array<double, 4>& a,
                                                 double c, double t) {
  const double r = std::sqrt(c);
  const double ch = std::cosh(r * t);
  const double sh = std::sinh(r * t) / r;
  return {ch + sh * a[0], sh * a[1], sh * a[2], ch + sh * a[3]};
}

// Eigenvalues of a real 2x2 via trace/determinant; returned as complex pair.
inline std::array<std::complex<double>, 2> eig_2x2(double a, double b, double c,
                                                   double d) {
  const double tr = a + d;
  const double det = a * d - b * c;
  const std::complex<double> disc =
      std::sqrt(std::complex<double>(tr * tr / 4.0 - det, 0.0));
  return {tr / 2.0 + disc, tr / 2.0 - disc};
}

// All roots of a monic polynomial z^n + c[n-1] z^{n-1} + ... + c[0] by the
// Durand-Kerner iteration.  Coefficients are real; roots come back complex.
inline std::vector<std::complex<double>> durand_kerner(
    const std::vector<double>& monic_coeffs_low_to_high) {
  const std::size_t n = monic_coeffs_low_to_high.size();
  auto eval = [&](std::complex<double> z) {
    std::complex<double> p(1.0, 0.0);
    for (std::size_t k = n; k-- > 0;) p = p * z + monic_coeffs_low_to_high[k];
    return p;
  };
  double radius = 1.0;
  for (double c : monic_coeffs_low_to_high)
    radius = std::max(radius, 1.0 + std::abs(c));
  std::vector<std::complex<double>> roots(n);
  const std::complex<double> seed(0.4, 0.9);  // classic non-real starting ray
  std::complex<double> p(1.0, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    p *= seed;
    roots[k] = radius * p;
  }
  for (int it = 0; it < 500; ++it) {
    double moved = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      std::complex<double> denom(1.0, 0.0);
      for (std::size_t j = 0; j < n; ++j)
        if (j != k) denom *= roots[k] - roots[j];
      const std::complex<double> delta = eval(roots[k]) / denom;
      roots[k] -= delta;
      moved = std::max(moved, std::abs(delta));
    }
    if (moved < 1e-14 * radius) break;
  }
  return roots;
}

// Characteristic polynomial of the 4x4 block companion [[0, I], [-G2, -G1]]
// built from 2x2 blocks: det(z^2 I + z G1 + G2), expanded by hand.
// g1/g2 row-major.  Returns monic coefficients c0..c3 (low to high).
inline std::vector<double> companion_quartic_coeffs(const std::array<double, 4>& g1,
                                                    const std::array<double, 4>& g2) {
  const double a = g1[0], b = g1[1], c = g1[2], d = g1[3];
  const double e = g2[0], f = g2[1], g = g2[2], h = g2[3];
  const double c3 = a + d;
  const double c2 = e + h + a * d - b * c;
  const double c1 = a * h + d * e - b * g - c * f;
  const double c0 = e * h - f * g;
  return {c0, c1, c2, c3};
}

// Spectral radius of the block companion via the quartic roots above.
inline double companion_spectral_radius(const std::array<double, 4>& g1,
                                        const std::array<double, 4>& g2) {
  const auto roots = durand_kerner(companion_quartic_coeffs(g1, g2));
  double r = 0.0;
  for (const auto& z : roots) r = std::max(r, std::abs(z));
  return r;
}

// Least-squares slope of y against x (for decay-rate fits in tests).
inline double lsq_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace oracles
