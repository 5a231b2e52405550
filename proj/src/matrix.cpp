#include "spdsd/matrix.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

#include "spdsd/error.hpp"

namespace spdsd {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix& Matrix::operator+=(const Matrix& other) {
  if (other.n_ != n_) throw DimensionMismatch("matrix add: dimension mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  if (other.n_ != n_) throw DimensionMismatch("matrix subtract: dimension mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(double s, Matrix a) { return a *= s; }

double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.n() != b.n()) throw DimensionMismatch("max_abs_diff: dimension mismatch");
  double m = 0.0;
  auto da = a.data();
  auto db = b.data();
  for (std::size_t k = 0; k < da.size(); ++k) m = std::max(m, std::abs(da[k] - db[k]));
  return m;
}

double trace(const Matrix& a) {
  double t = 0.0;
  for (std::size_t i = 0; i < a.n(); ++i) t += a(i, i);
  return t;
}

bool all_finite(const Matrix& a) {
  return std::all_of(a.data().begin(), a.data().end(), [](double v) { return std::isfinite(v); });
}

SymMatrix::SymMatrix(Matrix m) : m_(std::move(m)) {
  const std::size_t n = m_.n();
  const double scale = std::max(1.0, frobenius_norm(m_));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const double a = m_(i, j);
      const double b = m_(j, i);
      if (!std::isfinite(a) || !std::isfinite(b))
        throw std::invalid_argument("SymMatrix: non-finite entry");
      if (std::abs(a - b) > 1e-10 * scale)
        throw std::invalid_argument("SymMatrix: input is not symmetric");
      const double avg = 0.5 * (a + b);
      m_(i, j) = avg;
      m_(j, i) = avg;
    }
    if (!std::isfinite(m_(i, i))) throw std::invalid_argument("SymMatrix: non-finite entry");
  }
}

SymMatrix SymMatrix::symmetrize(const Matrix& m) {
  SymMatrix s(m.n());
  for (std::size_t i = 0; i < m.n(); ++i) {
    s.m_(i, i) = m(i, i);
    for (std::size_t j = 0; j < i; ++j) s.set(i, j, 0.5 * (m(i, j) + m(j, i)));
  }
  return s;
}

SymMatrix SymMatrix::diagonal(std::span<const double> d) {
  SymMatrix s(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) s.m_(i, i) = d[i];
  return s;
}

void SymMatrix::set(std::size_t i, std::size_t j, double v) {
  m_(i, j) = v;
  m_(j, i) = v;
}

LowerTriangular::LowerTriangular(Matrix m) : m_(std::move(m)) {
  for (std::size_t i = 0; i < m_.n(); ++i)
    for (std::size_t j = i + 1; j < m_.n(); ++j)
      if (m_(i, j) != 0.0) throw std::invalid_argument("LowerTriangular: nonzero above diagonal");
}

double& LowerTriangular::at(std::size_t i, std::size_t j) {
  assert(j <= i);
  return m_(i, j);
}

bool LowerTriangular::has_positive_diagonal() const {
  for (std::size_t i = 0; i < m_.n(); ++i)
    if (!(m_(i, i) > 0.0)) return false;
  return true;
}

}  // namespace spdsd
