#include "cifeast/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cifeast/error.hpp"

namespace cifeast {

DenseMatrix::DenseMatrix(Index rows, Index cols)
    : rows_(rows), cols_(cols), data_(rows * cols, Complex(0.0, 0.0)) {}

DenseMatrix::DenseMatrix(Index rows, Index cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows * cols) {
    fail(ErrorKind::InvalidArgument,
         "matrix entry count " + std::to_string(data_.size()) + " does not match " +
             std::to_string(rows) + "x" + std::to_string(cols));
  }
  if (!all_finite()) fail(ErrorKind::InvalidArgument, "matrix has non-finite entries");
}

DenseMatrix DenseMatrix::identity(Index n) {
  DenseMatrix m(n, n);
  for (Index i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::diagonal(std::span<const Complex> diag) {
  DenseMatrix m(diag.size(), diag.size());
  for (Index i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  if (!m.all_finite()) fail(ErrorKind::InvalidArgument, "matrix has non-finite entries");
  return m;
}

DenseMatrix DenseMatrix::from_rows(
    std::initializer_list<std::initializer_list<Complex>> rows) {
  const Index nr = rows.size();
  const Index nc = nr == 0 ? 0 : rows.begin()->size();
  std::vector<Complex> data(nr * nc);
  Index i = 0;
  for (const auto& row : rows) {
    if (row.size() != nc) fail(ErrorKind::InvalidArgument, "ragged matrix literal");
    Index j = 0;
    for (const auto& v : row) data[i + j++ * nr] = v;
    ++i;
  }
  return DenseMatrix(nr, nc, std::move(data));
}

bool DenseMatrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](const Complex& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

bool DenseMatrix::is_real() const noexcept {
  return std::all_of(data_.begin(), data_.end(),
                     [](const Complex& z) { return z.imag() == 0.0; });
}

DenseMatrix DenseMatrix::adjoint() const {
  DenseMatrix out(cols_, rows_);
  for (Index j = 0; j < cols_; ++j)
    for (Index i = 0; i < rows_; ++i) out(j, i) = std::conj((*this)(i, j));
  return out;
}

DenseMatrix DenseMatrix::conjugate() const {
  DenseMatrix out = *this;
  for (auto& z : out.data_) z = std::conj(z);
  return out;
}

DenseMatrix DenseMatrix::columns(Index first, Index count) const {
  if (first + count > cols_) fail(ErrorKind::DimensionMismatch, "column range out of bounds");
  DenseMatrix out(rows_, count);
  std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(first * rows_), count * rows_,
              out.data_.begin());
  return out;
}

void DenseMatrix::set_column(Index j, std::span<const Complex> values) {
  if (j >= cols_ || values.size() != rows_)
    fail(ErrorKind::DimensionMismatch, "set_column shape mismatch");
  std::copy(values.begin(), values.end(), col(j).begin());
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    fail(ErrorKind::DimensionMismatch, "matrix sum shape mismatch");
  for (Index k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

DenseMatrix& DenseMatrix::operator-=(const DenseMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    fail(ErrorKind::DimensionMismatch, "matrix difference shape mismatch");
  for (Index k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

DenseMatrix& DenseMatrix::operator*=(Complex alpha) {
  for (auto& z : data_) z *= alpha;
  return *this;
}

DenseMatrix operator+(DenseMatrix lhs, const DenseMatrix& rhs) { return lhs += rhs; }
DenseMatrix operator-(DenseMatrix lhs, const DenseMatrix& rhs) { return lhs -= rhs; }
DenseMatrix operator*(Complex alpha, DenseMatrix m) { return m *= alpha; }

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) fail(ErrorKind::DimensionMismatch, "matrix product shape mismatch");
  DenseMatrix c(a.rows(), b.cols());
  const Index m = a.rows();
  for (Index j = 0; j < b.cols(); ++j) {
    Complex* cj = c.col(j).data();
    for (Index k = 0; k < a.cols(); ++k) {
      const Complex bkj = b(k, j);
      if (bkj == Complex(0.0, 0.0)) continue;
      const Complex* ak = a.col(k).data();
      for (Index i = 0; i < m; ++i) cj[i] += ak[i] * bkj;
    }
  }
  return c;
}

DenseMatrix adjoint_times(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows())
    fail(ErrorKind::DimensionMismatch, "adjoint product shape mismatch");
  DenseMatrix c(a.cols(), b.cols());
  for (Index j = 0; j < b.cols(); ++j)
    for (Index i = 0; i < a.cols(); ++i) c(i, j) = dot(a.col(i), b.col(j));
  return c;
}

DenseMatrix linear_combination(Complex alpha, const DenseMatrix& a, Complex beta,
                               const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    fail(ErrorKind::DimensionMismatch, "linear combination shape mismatch");
  DenseMatrix c(a.rows(), a.cols());
  auto ca = a.entries();
  auto cb = b.entries();
  auto cc = c.entries();
  for (Index k = 0; k < cc.size(); ++k) cc[k] = alpha * ca[k] + beta * cb[k];
  return c;
}

double frobenius_norm(const DenseMatrix& m) { return norm2(m.entries()); }

double max_abs(const DenseMatrix& m) {
  double best = 0.0;
  for (const auto& z : m.entries()) best = std::max(best, std::abs(z));
  return best;
}

double norm2(std::span<const Complex> v) {
  // Scaled accumulation so that tiny or huge entries do not under/overflow.
  double scale = 0.0;
  double ssq = 1.0;
  for (const auto& z : v) {
    for (double x : {z.real(), z.imag()}) {
      if (x == 0.0) continue;
      const double ax = std::abs(x);
      if (scale < ax) {
        ssq = 1.0 + ssq * (scale / ax) * (scale / ax);
        scale = ax;
      } else {
        ssq += (ax / scale) * (ax / scale);
      }
    }
  }
  return scale * std::sqrt(ssq);
}

Complex dot(std::span<const Complex> x, std::span<const Complex> y) {
  if (x.size() != y.size()) fail(ErrorKind::DimensionMismatch, "dot length mismatch");
  Complex sum(0.0, 0.0);
  for (Index i = 0; i < x.size(); ++i) sum += std::conj(x[i]) * y[i];
  return sum;
}

std::vector<Complex> multiply(const DenseMatrix& m, std::span<const Complex> x) {
  if (m.cols() != x.size()) fail(ErrorKind::DimensionMismatch, "matvec length mismatch");
  std::vector<Complex> y(m.rows(), Complex(0.0, 0.0));
  for (Index k = 0; k < m.cols(); ++k) {
    const Complex xk = x[k];
    const Complex* mk = m.col(k).data();
    for (Index i = 0; i < m.rows(); ++i) y[i] += mk[i] * xk;
  }
  return y;
}

}  // namespace cifeast
