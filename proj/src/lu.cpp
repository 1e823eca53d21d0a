#include <algorithm>
#include <limits>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "cifeast/dense.hpp"
#include "cifeast/error.hpp"

namespace cifeast {

LuFactorization lu_factor(DenseMatrix m) {
  if (!m.square()) fail(ErrorKind::DimensionMismatch, "lu_factor needs a square matrix");
  if (!m.all_finite()) fail(ErrorKind::InvalidArgument, "lu_factor input has non-finite entries");

  const Index n = m.rows();
  LuFactorization fac;
  fac.input_norm = frobenius_norm(m);
  fac.perm.resize(n);
  std::iota(fac.perm.begin(), fac.perm.end(), Index{0});
  fac.min_pivot = n == 0 ? 0.0 : std::numeric_limits<double>::infinity();

  for (Index k = 0; k < n; ++k) {
    Complex* ck = m.col(k).data();
    Index p = k;
    double best = std::abs(ck[k]);
    for (Index i = k + 1; i < n; ++i) {
      const double v = std::abs(ck[i]);
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (best == 0.0) {
      fail(ErrorKind::ExactSingular,
           "exactly zero pivot in column " + std::to_string(k) + " of " + std::to_string(n));
    }
    fac.min_pivot = std::min(fac.min_pivot, best);
    if (p != k) {
      std::swap(fac.perm[k], fac.perm[p]);
      for (Index j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
    }
    const Complex inv = 1.0 / ck[k];
    for (Index i = k + 1; i < n; ++i) ck[i] *= inv;
    for (Index j = k + 1; j < n; ++j) {
      Complex* cj = m.col(j).data();
      const Complex ukj = cj[k];
      if (ukj == Complex(0.0, 0.0)) continue;
      for (Index i = k + 1; i < n; ++i) cj[i] -= ck[i] * ukj;
    }
  }
  fac.lu = std::move(m);
  return fac;
}

namespace {

void solve_in_place(const DenseMatrix& lu, std::span<Complex> x) {
  const Index n = lu.rows();
  for (Index k = 0; k < n; ++k) {
    const Complex xk = x[k];
    if (xk == Complex(0.0, 0.0)) continue;
    const Complex* lk = lu.col(k).data();
    for (Index i = k + 1; i < n; ++i) x[i] -= lk[i] * xk;
  }
  for (Index k = n; k-- > 0;) {
    const Complex* uk = lu.col(k).data();
    x[k] /= uk[k];
    const Complex xk = x[k];
    if (xk == Complex(0.0, 0.0)) continue;
    for (Index i = 0; i < k; ++i) x[i] -= uk[i] * xk;
  }
}

}  // namespace

DenseMatrix lu_solve(const LuFactorization& fac, const DenseMatrix& rhs) {
  const Index n = fac.size();
  if (rhs.rows() != n)
    fail(ErrorKind::DimensionMismatch, "lu_solve: rhs has " + std::to_string(rhs.rows()) +
                                           " rows, factorization has " + std::to_string(n));
  DenseMatrix x(n, rhs.cols());
  for (Index j = 0; j < rhs.cols(); ++j) {
    auto xj = x.col(j);
    auto bj = rhs.col(j);
    for (Index i = 0; i < n; ++i) xj[i] = bj[fac.perm[i]];
    solve_in_place(fac.lu, xj);
  }
  return x;
}

DenseMatrix lu_solve_conjugate(const LuFactorization& fac, const DenseMatrix& rhs) {
  return lu_solve(fac, rhs.conjugate()).conjugate();
}

DenseMatrix lu_reconstruct(const LuFactorization& fac) {
  const Index n = fac.size();
  DenseMatrix lower = DenseMatrix::identity(n);
  DenseMatrix upper(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) (i > j ? lower(i, j) : upper(i, j)) = fac.lu(i, j);
  const DenseMatrix pm = lower * upper;
  DenseMatrix out(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) out(fac.perm[i], j) = pm(i, j);
  return out;
}

}  // namespace cifeast
