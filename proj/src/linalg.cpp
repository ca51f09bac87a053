#include "predictorlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace predictorlab {

namespace {

void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

void check_finite(const std::vector<double>& entries, const char* what) {
  for (double e : entries) {
    if (!std::isfinite(e)) {
      throw std::invalid_argument(std::string(what) +
                                  ": non-finite entry on construction");
    }
  }
}

}  // namespace

Vector::Vector(std::initializer_list<double> entries) : data_(entries) {
  check_finite(data_, "Vector");
}

Vector::Vector(std::vector<double> entries) : data_(std::move(entries)) {
  check_finite(data_, "Vector");
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  require(rows_ * cols_ == data_.size(),
          "Matrix: entry count does not match rows*cols");
  check_finite(data_, "Matrix");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    require(r.size() == cols_, "Matrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
  check_finite(data_, "Matrix");
}

Matrix Matrix::identity(std::size_t n) {
  Matrix i(n, n);
  for (std::size_t k = 0; k < n; ++k) i(k, k) = 1.0;
  return i;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "Matrix +: shape mismatch");
  Matrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows() * a.cols(); ++i)
    c(i / a.cols(), i % a.cols()) = a.data()[i] + b.data()[i];
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "Matrix -: shape mismatch");
  Matrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows() * a.cols(); ++i)
    c(i / a.cols(), i % a.cols()) = a.data()[i] - b.data()[i];
  return c;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), "Matrix *: inner dimension mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

Matrix operator*(double s, const Matrix& a) {
  Matrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = s * a(i, j);
  return c;
}

Vector operator*(const Matrix& a, const Vector& v) {
  require(a.cols() == v.dim(), "Matrix * Vector: dimension mismatch");
  Vector w(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * v[j];
    w[i] = s;
  }
  return w;
}

Vector operator+(const Vector& a, const Vector& b) {
  require(a.dim() == b.dim(), "Vector +: dimension mismatch");
  Vector c(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) c[i] = a[i] + b[i];
  return c;
}

Vector operator-(const Vector& a, const Vector& b) {
  require(a.dim() == b.dim(), "Vector -: dimension mismatch");
  Vector c(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) c[i] = a[i] - b[i];
  return c;
}

Vector operator*(double s, const Vector& v) {
  Vector c(v.dim());
  for (std::size_t i = 0; i < v.dim(); ++i) c[i] = s * v[i];
  return c;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix k(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t ia = 0; ia < a.rows(); ++ia)
    for (std::size_t ja = 0; ja < a.cols(); ++ja) {
      const double aij = a(ia, ja);
      if (aij == 0.0) continue;
      for (std::size_t ib = 0; ib < b.rows(); ++ib)
        for (std::size_t jb = 0; jb < b.cols(); ++jb)
          k(ia * b.rows() + ib, ja * b.cols() + jb) = aij * b(ib, jb);
    }
  return k;
}

double norm(const Vector& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.dim(); ++i) s += v[i] * v[i];
  return std::sqrt(s);
}

double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (double e : a.data()) s += e * e;
  return std::sqrt(s);
}

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (double e : a.data()) m = std::max(m, std::abs(e));
  return m;
}

SingularMatrixError::SingularMatrixError(std::size_t pivot_index)
    : std::runtime_error("matrix singular to working precision at pivot index " +
                         std::to_string(pivot_index)),
      pivot_index_(pivot_index) {}

Matrix expm(const Matrix& m, double t) {
  require(m.square(), "expm: matrix must be square");
  if (!std::isfinite(t)) throw std::invalid_argument("expm: t must be finite");
  const std::size_t n = m.rows();

  Matrix x = t * m;
  // Scale so ||X/2^s||_F <= 0.5, then square back.  With the Taylor tail cut
  // at 1e-20 relative this meets the 1e-12 relative contract for ||Mt|| <= 50.
  const double nx = frobenius_norm(x);
  int s = 0;
  if (nx > 0.5) {
    s = static_cast<int>(std::ceil(std::log2(nx / 0.5)));
    x = std::ldexp(1.0, -s) * x;
  }

  Matrix sum = Matrix::identity(n);
  Matrix term = Matrix::identity(n);
  for (int k = 1; k <= 40; ++k) {
    term = (1.0 / k) * (term * x);
    const double tn = frobenius_norm(term);
    Matrix next(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) next(i, j) = sum(i, j) + term(i, j);
    sum = next;
    if (tn <= 1e-20 * frobenius_norm(sum)) break;
  }
  for (int k = 0; k < s; ++k) sum = sum * sum;

  for (double e : sum.data()) {
    if (!std::isfinite(e))
      throw std::range_error("expm: result exceeds double range");
  }
  return sum;
}

Vector solve_linear(const Matrix& a, const Vector& b) {
  require(a.square(), "solve_linear: matrix must be square");
  require(a.rows() == b.dim(), "solve_linear: right-hand side dimension mismatch");
  const std::size_t n = a.rows();
  Matrix lu = a;
  Vector x = b;
  // Pivot floor relative to the matrix scale: below it the column is treated
  // as exactly dependent.
  const double tol = static_cast<double>(std::max<std::size_t>(n, 4)) *
                     std::numeric_limits<double>::epsilon() * max_abs(a);

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    double best = std::abs(lu(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      const double cand = std::abs(lu(r, col));
      if (cand > best) {
        best = cand;
        piv = r;
      }
    }
    if (best <= tol) throw SingularMatrixError(col);
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu(col, j), lu(piv, j));
      std::swap(x[col], x[piv]);
    }
    const double d = lu(col, col);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = lu(r, col) / d;
      if (f == 0.0) continue;
      lu(r, col) = 0.0;
      for (std::size_t j = col + 1; j < n; ++j) lu(r, j) -= f * lu(col, j);
      x[r] -= f * x[col];
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = x[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= lu(i, j) * x[j];
    x[i] = s / lu(i, i);
  }
  return x;
}

HurwitzCertificate hurwitz_certificate(const Matrix& m) {
  require(m.square(), "hurwitz_certificate: matrix must be square");
  const std::size_t n = m.rows();
  require(n <= 12, "hurwitz_certificate: n <= 12 required (Kronecker system is n^2 x n^2)");

  // Column-stacking vec: M^T P + P M = -I  <=>  (I (x) M^T + M^T (x) I) vec(P) = vec(-I).
  const Matrix mt = transpose(m);
  const Matrix id = Matrix::identity(n);
  const Matrix k = kron(id, mt) + kron(mt, id);
  Vector rhs(n * n);
  for (std::size_t i = 0; i < n; ++i) rhs[i + n * i] = -1.0;

  HurwitzCertificate cert;
  Vector vec_p(n * n);
  try {
    vec_p = solve_linear(k, rhs);
  } catch (const SingularMatrixError&) {
    cert.marginal = true;  // some eigenvalue pair of M sums to zero
    return cert;
  }

  Matrix p(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) p(i, j) = vec_p[i + n * j];
  // The exact solution is symmetric; discard the solver's asymmetry roundoff.
  p = 0.5 * (p + transpose(p));

  // Positive definiteness by Cholesky with a relative pivot floor.
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(p(i, i)));
  const double floor = 1e-12 * std::max(max_diag, 1e-300);
  Matrix chol(n, n);
  bool pd = true;
  for (std::size_t i = 0; i < n && pd; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = p(i, j);
      for (std::size_t t = 0; t < j; ++t) s -= chol(i, t) * chol(j, t);
      if (i == j) {
        if (s <= floor) {
          pd = false;
          break;
        }
        chol(i, i) = std::sqrt(s);
      } else {
        chol(i, j) = s / chol(j, j);
      }
    }
  }

  cert.is_hurwitz = pd;
  if (pd) {
    cert.has_p = true;
    cert.p = p;
  }
  return cert;
}

double spectral_radius(const Matrix& m) {
  require(m.square(), "spectral_radius: matrix must be square");
  Matrix x = m;
  double log_scale = 0.0;  // X == M^{2^j} / exp(log_scale), entrywise
  double nx = frobenius_norm(x);
  if (nx == 0.0) return 0.0;
  double est = nx;  // j = 0 estimate: ||M||
  for (int j = 1; j <= 64; ++j) {
    const double inv = 1.0 / nx;
    Matrix y(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i)
      for (std::size_t c = 0; c < x.cols(); ++c) y(i, c) = inv * x(i, c);
    x = y * y;
    log_scale = 2.0 * (log_scale + std::log(nx));
    nx = frobenius_norm(x);
    if (nx == 0.0) return 0.0;  // nilpotent at working precision
    const double next = std::exp((std::log(nx) + log_scale) / std::ldexp(1.0, j));
    if (std::abs(next - est) <= 1e-8 * std::max(next, 1e-300)) return next;
    est = next;
  }
  return est;
}

double spectral_abscissa(const Matrix& m) {
  return std::log(spectral_radius(expm(m, 1.0)));
}

namespace {

double power_iteration(const Matrix& g, Vector v) {
  double nv = norm(v);
  if (nv == 0.0) return 0.0;
  v = (1.0 / nv) * v;
  double lambda = 0.0;
  for (int it = 0; it < 10000; ++it) {
    Vector w = g * v;
    double r = 0.0;  // Rayleigh quotient v^T G v
    for (std::size_t i = 0; i < v.dim(); ++i) r += v[i] * w[i];
    const double nw = norm(w);
    if (nw == 0.0) return std::max(r, 0.0);
    v = (1.0 / nw) * w;
    if (it > 0 && std::abs(r - lambda) <= 1e-9 * std::max(std::abs(r), 1e-300)) {
      return std::max(r, 0.0);
    }
    lambda = r;
  }
  return std::max(lambda, 0.0);
}

}  // namespace

double operator_norm(const Matrix& m) {
  require(m.rows() > 0 && m.cols() > 0, "operator_norm: empty matrix");
  const Matrix g = transpose(m) * m;
  if (frobenius_norm(g) == 0.0) return 0.0;
  const std::size_t n = g.rows();
  Vector ones(n), alt(n);
  for (std::size_t i = 0; i < n; ++i) {
    ones[i] = 1.0;
    alt[i] = (i % 2 == 0) ? 1.0 : -1.0;
  }
  // The all-ones start can lie exactly in ker(M^T M); the fixed alternating
  // start covers that, and the max of the two Rayleigh limits is returned.
  const double a = power_iteration(g, ones);
  const double b = power_iteration(g, alt);
  return std::sqrt(std::max(a, b));
}

}  // namespace predictorlab
