#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace spdsd {

/// Dense square matrix, row-major.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

  static Matrix identity(std::size_t n);

  std::size_t n() const { return n_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * n_, n_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * n_, n_}; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  Matrix transposed() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(double s, Matrix a);

double frobenius_norm(const Matrix& a);
double max_abs_diff(const Matrix& a, const Matrix& b);
double trace(const Matrix& a);
bool all_finite(const Matrix& a);

/// Symmetric matrix. Symmetry is exact: construction averages the two
/// triangles after checking they agree to a relative 1e-10.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t n) : m_(n) {}
  /// Throws std::invalid_argument if `m` is not symmetric within tolerance
  /// or holds a non-finite value.
  explicit SymMatrix(Matrix m);

  /// Returns (m + m^T) / 2 without checking.
  static SymMatrix symmetrize(const Matrix& m);
  static SymMatrix identity(std::size_t n) { return SymMatrix(Matrix::identity(n)); }
  static SymMatrix diagonal(std::span<const double> d);

  std::size_t n() const { return m_.n(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  // Writes both (i,j) and (j,i).
  void set(std::size_t i, std::size_t j, double v);

  const Matrix& matrix() const { return m_; }
  // Mutable access for kernels that preserve symmetry themselves.
  Matrix& raw() { return m_; }

  friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

 private:
  Matrix m_;
};

/// Lower-triangular matrix: entries strictly above the diagonal are zero.
class LowerTriangular {
 public:
  LowerTriangular() = default;
  explicit LowerTriangular(std::size_t n) : m_(n) {}
  /// Throws std::invalid_argument if `m` has a nonzero above the diagonal.
  explicit LowerTriangular(Matrix m);

  static LowerTriangular identity(std::size_t n) { return LowerTriangular(Matrix::identity(n)); }

  std::size_t n() const { return m_.n(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  // Only j <= i may be written.
  double& at(std::size_t i, std::size_t j);

  bool has_positive_diagonal() const;

  const Matrix& matrix() const { return m_; }
  Matrix& raw() { return m_; }

  friend bool operator==(const LowerTriangular&, const LowerTriangular&) = default;

 private:
  Matrix m_;
};

}  // namespace spdsd
