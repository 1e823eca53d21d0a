#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace cifeast {

using Complex = std::complex<double>;
using Index = std::size_t;

/// Dense complex matrix, column-major storage.
///
/// Entry (i, j) lives at entries()[i + j * rows()]. All entries are finite on
/// construction from external data; the zero/identity factories trivially
/// satisfy this.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(Index rows, Index cols);
  /// Takes column-major entries; throws InvalidArgument on size mismatch or
  /// non-finite values.
  DenseMatrix(Index rows, Index cols, std::vector<Complex> entries);

  static DenseMatrix identity(Index n);
  static DenseMatrix diagonal(std::span<const Complex> diag);
  /// Row-major literal, convenient for small fixed matrices in tests.
  static DenseMatrix from_rows(std::initializer_list<std::initializer_list<Complex>> rows);

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }
  bool square() const noexcept { return rows_ == cols_; }

  Complex& operator()(Index i, Index j) noexcept { return data_[i + j * rows_]; }
  const Complex& operator()(Index i, Index j) const noexcept { return data_[i + j * rows_]; }

  std::span<Complex> col(Index j) noexcept { return {data_.data() + j * rows_, rows_}; }
  std::span<const Complex> col(Index j) const noexcept {
    return {data_.data() + j * rows_, rows_};
  }

  std::span<Complex> entries() noexcept { return data_; }
  std::span<const Complex> entries() const noexcept { return data_; }

  bool all_finite() const noexcept;
  /// True when every imaginary part is exactly zero.
  bool is_real() const noexcept;

  DenseMatrix adjoint() const;
  DenseMatrix conjugate() const;
  /// Columns [first, first + count).
  DenseMatrix columns(Index first, Index count) const;
  void set_column(Index j, std::span<const Complex> values);

  DenseMatrix& operator+=(const DenseMatrix& other);
  DenseMatrix& operator-=(const DenseMatrix& other);
  DenseMatrix& operator*=(Complex alpha);

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Complex> data_;
};

DenseMatrix operator+(DenseMatrix lhs, const DenseMatrix& rhs);
DenseMatrix operator-(DenseMatrix lhs, const DenseMatrix& rhs);
DenseMatrix operator*(Complex alpha, DenseMatrix m);
DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);

/// a^* b without forming the adjoint.
DenseMatrix adjoint_times(const DenseMatrix& a, const DenseMatrix& b);

/// alpha * a + beta * b, same shapes.
DenseMatrix linear_combination(Complex alpha, const DenseMatrix& a, Complex beta,
                               const DenseMatrix& b);

double frobenius_norm(const DenseMatrix& m);
double max_abs(const DenseMatrix& m);

double norm2(std::span<const Complex> v);
Complex dot(std::span<const Complex> x, std::span<const Complex> y);  // x^* y
std::vector<Complex> multiply(const DenseMatrix& m, std::span<const Complex> x);

}  // namespace cifeast
