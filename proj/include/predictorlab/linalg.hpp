#pragma once

// Dense real linear algebra kernels for the predictor toolkit: matrix
// exponential, pivoted linear solves, Lyapunov-based Hurwitz certificates,
// spectral radius/abscissa, induced 2-norm.  Double precision throughout;
// sizes are desk-scale (n <= ~24), so everything is straightforward dense
// code with explicit accuracy contracts rather than a tuned BLAS.

#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace predictorlab {

class Vector {
 public:
  Vector() = default;
  // Zero vector of the given dimension.
  explicit Vector(std::size_t dim) : data_(dim, 0.0) {}
  // Entries are validated: every entry must be finite.
  Vector(std::initializer_list<double> entries);
  explicit Vector(std::vector<double> entries);

  std::size_t dim() const { return data_.size(); }
  double operator[](std::size_t i) const { return data_[i]; }
  double& operator[](std::size_t i) { return data_[i]; }
  const std::vector<double>& data() const { return data_; }

 private:
  std::vector<double> data_;
};

class Matrix {
 public:
  Matrix() = default;
  // Zero matrix of the given shape.
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  // Row-major entries; validated finite, count must equal rows*cols.
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_ && rows_ > 0; }

  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }
  double& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }
  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Arithmetic.  Dimension mismatches throw std::invalid_argument.
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
Vector operator*(const Matrix& a, const Vector& v);
Vector operator+(const Vector& a, const Vector& b);
Vector operator-(const Vector& a, const Vector& b);
Vector operator*(double s, const Vector& v);

Matrix transpose(const Matrix& a);
// Kronecker product, column-stacking convention: vec(AXB) = (B^T (x) A) vec(X).
Matrix kron(const Matrix& a, const Matrix& b);

double norm(const Vector& v);            // Euclidean
double frobenius_norm(const Matrix& a);
double max_abs(const Matrix& a);

// Thrown by solve_linear (and propagated through hurwitz_certificate as the
// "marginal" outcome) when elimination meets a pivot at working-precision zero.
class SingularMatrixError : public std::runtime_error {
 public:
  explicit SingularMatrixError(std::size_t pivot_index);
  std::size_t pivot_index() const { return pivot_index_; }

 private:
  std::size_t pivot_index_;
};

// e^{Mt} by scaling-and-squaring with a truncated Taylor kernel.
// Contract: relative error <= 1e-12 in operator norm for ||Mt|| <= 50.
// t may be negative.  Throws std::invalid_argument (non-square) or
// std::range_error (result overflows double range).
Matrix expm(const Matrix& m, double t);

// LU with partial pivoting.  Residual contract:
// ||Ax - b|| <= 1e-10 (||A|| ||x|| + ||b||) for condition numbers <= 1e6.
Vector solve_linear(const Matrix& a, const Vector& b);

struct HurwitzCertificate {
  bool is_hurwitz = false;
  // True when the Lyapunov (Kronecker) system is singular to working
  // precision, i.e. some eigenvalue pair of M sums to zero.
  bool marginal = false;
  bool has_p = false;
  Matrix p;  // solves M^T P + P M = -I when has_p
};

// Constructive Hurwitz test: solve M^T P + P M = -I via the n^2 x n^2
// Kronecker system, then check P symmetric positive definite (Cholesky with
// a relative pivot floor).  Requires n <= 12.
HurwitzCertificate hurwitz_certificate(const Matrix& m);

// Gelfand's formula with repeated squaring and per-step Frobenius
// renormalization; stops when successive estimates agree to 1e-8 or after
// 64 squarings.  Relative error <= 1e-6 for diagonalizable inputs;
// returns 0 exactly for matrices nilpotent at working precision.
double spectral_radius(const Matrix& m);

// max Re lambda(M), computed as log(spectral_radius(expm(M, 1))).
// Accuracy inherited from both kernels; documented <= 1e-5 absolute.
double spectral_abscissa(const Matrix& m);

// Induced 2-norm (largest singular value) via power iteration on M^T M with
// two fixed deterministic starts (all-ones and alternating +-1; the max of
// the two runs is returned, which covers starts lying in ker(M^T M)).
// Relative error <= 1e-8 given a reasonable spectral gap.
double operator_norm(const Matrix& m);

}  // namespace predictorlab
