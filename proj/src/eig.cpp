#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "cifeast/dense.hpp"
#include "cifeast/error.hpp"

namespace cifeast {
namespace {

constexpr double kUlp = std::numeric_limits<double>::epsilon();
constexpr double kSafeMin = std::numeric_limits<double>::min();

double cabs1(Complex z) { return std::abs(z.real()) + std::abs(z.imag()); }

double smlnum_for(Index n) {
  return kSafeMin * (static_cast<double>(std::max<Index>(n, 1)) / kUlp);
}

// Reduces h to upper Hessenberg form in place; accumulates the unitary
// similarity into z when given (h_in = z * h_out * z^*).
void hessenberg_reduce(DenseMatrix& h, DenseMatrix* z) {
  const Index n = h.rows();
  if (n < 3) return;
  std::vector<Complex> v(n);
  std::vector<Complex> w(n);
  for (Index k = 0; k + 2 < n; ++k) {
    const Index len = n - k - 1;
    Complex* x = h.col(k).data() + k + 1;
    const Complex alpha = x[0];
    const double xnorm = norm2(std::span<const Complex>(x + 1, len - 1));
    if (xnorm == 0.0 && alpha.imag() == 0.0) continue;
    const double full = std::hypot(std::abs(alpha), xnorm);
    const double beta = alpha.real() >= 0.0 ? -full : full;
    const Complex tau((beta - alpha.real()) / beta, -alpha.imag() / beta);
    const Complex scale = 1.0 / (alpha - beta);
    v[0] = 1.0;
    for (Index i = 1; i < len; ++i) v[i] = x[i] * scale;
    x[0] = beta;
    for (Index i = 1; i < len; ++i) x[i] = 0.0;

    // Left: rows k+1.., columns k+1.. get H^* applied.
    const Complex tau_c = std::conj(tau);
    for (Index c = k + 1; c < n; ++c) {
      Complex* col = h.col(c).data() + k + 1;
      Complex s(0.0, 0.0);
      for (Index i = 0; i < len; ++i) s += std::conj(v[i]) * col[i];
      s *= tau_c;
      for (Index i = 0; i < len; ++i) col[i] -= v[i] * s;
    }
    // Right: all rows, columns k+1.. get H applied: M <- M - (M v) tau v^*.
    auto apply_right = [&](DenseMatrix& m) {
      std::fill(w.begin(), w.end(), Complex(0.0, 0.0));
      for (Index i = 0; i < len; ++i) {
        const Complex vi = v[i];
        const Complex* col = m.col(k + 1 + i).data();
        for (Index r = 0; r < n; ++r) w[r] += col[r] * vi;
      }
      for (Index i = 0; i < len; ++i) {
        const Complex f = tau * std::conj(v[i]);
        Complex* col = m.col(k + 1 + i).data();
        for (Index r = 0; r < n; ++r) col[r] -= w[r] * f;
      }
    };
    apply_right(h);
    if (z != nullptr) apply_right(*z);
  }
}

struct Givens {
  double c = 1.0;
  Complex s{0.0, 0.0};
};

// G = [[c, s], [-conj(s), c]] with G * [x; y] = [r; 0].
Givens make_givens(Complex x, Complex y, Complex& r) {
  Givens g;
  if (y == Complex(0.0, 0.0)) {
    r = x;
    return g;
  }
  if (x == Complex(0.0, 0.0)) {
    const double ay = std::abs(y);
    g.c = 0.0;
    g.s = std::conj(y) / ay;
    r = ay;
    return g;
  }
  const double ax = std::abs(x);
  const double nrm = std::hypot(ax, std::abs(y));
  const Complex phase = x / ax;
  g.c = ax / nrm;
  g.s = phase * std::conj(y) / nrm;
  r = phase * nrm;
  return g;
}

// Single-shift complex QR iteration on an upper Hessenberg matrix. With
// `full`, the whole Schur form is produced and z (if given) accumulates the
// Schur vectors; otherwise only the diagonal is meaningful on return.
void hessenberg_qr(DenseMatrix& h, DenseMatrix* z, bool full) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(h.rows());
  if (n == 0) return;
  const double smlnum = smlnum_for(static_cast<Index>(n));
  const long max_sweeps = 30L * n;
  long sweeps = 0;

  auto H = [&](std::ptrdiff_t i, std::ptrdiff_t j) -> Complex& {
    return h(static_cast<Index>(i), static_cast<Index>(j));
  };

  std::ptrdiff_t i = n - 1;
  int its = 0;
  while (i >= 0) {
    std::ptrdiff_t l = i;
    for (; l > 0; --l) {
      double s = cabs1(H(l - 1, l - 1)) + cabs1(H(l, l));
      if (s == 0.0) {
        if (l - 2 >= 0) s += cabs1(H(l - 1, l - 2));
        if (l + 1 < n) s += cabs1(H(l + 1, l));
      }
      if (cabs1(H(l, l - 1)) <= std::max(kUlp * s, smlnum)) break;
    }
    if (l > 0) H(l, l - 1) = 0.0;
    if (l == i) {
      --i;
      its = 0;
      continue;
    }

    if (sweeps >= max_sweeps) {
      fail(ErrorKind::NoConvergence,
           "QR iteration did not converge in " + std::to_string(max_sweeps) + " sweeps");
    }
    ++sweeps;
    ++its;

    Complex mu;
    if (its % 10 == 0) {
      // Exceptional shift, alternating ends of the active block.
      if (its % 20 == 0) {
        mu = 0.75 * std::abs(H(i, i - 1).real()) + H(i, i);
      } else {
        mu = 0.75 * std::abs(H(l + 1, l).real()) + H(l, l);
      }
    } else {
      // Eigenvalue of the trailing 2x2 block closest to H(i, i).
      mu = H(i, i);
      const Complex u = std::sqrt(H(i - 1, i)) * std::sqrt(H(i, i - 1));
      double s = cabs1(u);
      if (s != 0.0) {
        const Complex x = 0.5 * (H(i - 1, i - 1) - mu);
        const double sx = cabs1(x);
        s = std::max(s, sx);
        Complex y = s * std::sqrt((x / s) * (x / s) + (u / s) * (u / s));
        if (sx > 0.0 && ((x / sx).real() * y.real() + (x / sx).imag() * y.imag()) < 0.0) y = -y;
        mu -= u * (u / (x + y));
      }
    }

    const std::ptrdiff_t col_end = full ? n - 1 : i;
    const std::ptrdiff_t row_begin = full ? 0 : l;
    for (std::ptrdiff_t k = l; k < i; ++k) {
      Complex x, y, r;
      if (k == l) {
        x = H(l, l) - mu;
        y = H(l + 1, l);
      } else {
        x = H(k, k - 1);
        y = H(k + 1, k - 1);
      }
      const Givens g = make_givens(x, y, r);
      std::ptrdiff_t jstart = k;
      if (k > l) {
        H(k, k - 1) = r;
        H(k + 1, k - 1) = 0.0;
      }
      for (std::ptrdiff_t j = jstart; j <= col_end; ++j) {
        const Complex a = H(k, j);
        const Complex b = H(k + 1, j);
        H(k, j) = g.c * a + g.s * b;
        H(k + 1, j) = -std::conj(g.s) * a + g.c * b;
      }
      const std::ptrdiff_t row_end = std::min(k + 2, i);
      const Complex sc = std::conj(g.s);
      Complex* ck = h.col(static_cast<Index>(k)).data();
      Complex* ck1 = h.col(static_cast<Index>(k + 1)).data();
      for (std::ptrdiff_t r2 = row_begin; r2 <= row_end; ++r2) {
        const Complex a = ck[r2];
        const Complex b = ck1[r2];
        ck[r2] = g.c * a + sc * b;
        ck1[r2] = -g.s * a + g.c * b;
      }
      if (z != nullptr) {
        Complex* zk = z->col(static_cast<Index>(k)).data();
        Complex* zk1 = z->col(static_cast<Index>(k + 1)).data();
        for (std::ptrdiff_t r2 = 0; r2 < n; ++r2) {
          const Complex a = zk[r2];
          const Complex b = zk1[r2];
          zk[r2] = g.c * a + sc * b;
          zk1[r2] = -g.s * a + g.c * b;
        }
      }
    }
  }
}

// Right eigenvectors of the upper triangular t, transformed by z.
DenseMatrix schur_eigenvectors(const DenseMatrix& t, const DenseMatrix& z) {
  const Index n = t.rows();
  DenseMatrix out(n, n);
  std::vector<Complex> x(n);
  for (Index ki = 0; ki < n; ++ki) {
    const Complex lambda = t(ki, ki);
    const double smin = std::max(kUlp * cabs1(lambda), smlnum_for(n));
    std::fill(x.begin(), x.end(), Complex(0.0, 0.0));
    x[ki] = 1.0;
    for (Index j = ki; j-- > 0;) {
      Complex s = t(j, ki) * x[ki];
      for (Index m = j + 1; m < ki; ++m) s += t(j, m) * x[m];
      Complex d = t(j, j) - lambda;
      if (cabs1(d) < smin) d = smin;
      x[j] = -s / d;
      if (cabs1(x[j]) > 1e150) {
        for (Index m = j; m <= ki; ++m) x[m] *= 1e-150;
      }
    }
    auto col = out.col(ki);
    for (Index j = 0; j <= ki; ++j) {
      const Complex xj = x[j];
      if (xj == Complex(0.0, 0.0)) continue;
      const Complex* zj = z.col(j).data();
      for (Index r = 0; r < n; ++r) col[r] += zj[r] * xj;
    }
    const double nrm = norm2(col);
    for (auto& c : col) c /= nrm;
  }
  return out;
}

}  // namespace

SmallEigResult eig_dense(const DenseMatrix& m, EigOptions options) {
  if (!m.square()) fail(ErrorKind::DimensionMismatch, "eig_dense needs a square matrix");
  if (!m.all_finite()) fail(ErrorKind::InvalidArgument, "eig_dense input has non-finite entries");
  const Index n = m.rows();
  SmallEigResult out;
  DenseMatrix h = m;
  if (options.want_vectors) {
    DenseMatrix z = DenseMatrix::identity(n);
    hessenberg_reduce(h, &z);
    hessenberg_qr(h, &z, true);
    out.values.resize(n);
    for (Index i = 0; i < n; ++i) out.values[i] = h(i, i);
    out.vectors = schur_eigenvectors(h, z);
  } else {
    hessenberg_reduce(h, nullptr);
    hessenberg_qr(h, nullptr, false);
    out.values.resize(n);
    for (Index i = 0; i < n; ++i) out.values[i] = h(i, i);
  }
  return out;
}

SmallEigResult eig_generalized(const DenseMatrix& a, const DenseMatrix& b, EigOptions options) {
  if (!a.square() || !b.square() || a.rows() != b.rows())
    fail(ErrorKind::DimensionMismatch, "eig_generalized needs square matrices of equal size");
  const Index k = a.rows();
  const double norm_b = frobenius_norm(b);

  if (norm_b > 0.0) {
    try {
      const LuFactorization lu = lu_factor(b);
      if (lu.min_pivot > kReductionPivotGate * norm_b) {
        SmallEigResult res = eig_dense(lu_solve(lu, a), options);
        res.conditioning = Conditioning::WellConditioned;
        return res;
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ExactSingular) throw;
    }
  }

  // Shifted inverse: A y = lambda B y  <=>  (A - mu B)^{-1} B y = nu y with
  // nu = 1 / (lambda - mu). The shifts are fixed so results are reproducible.
  const double norm_a = frobenius_norm(a);
  const double scale = norm_b > 0.0 ? norm_a / norm_b : std::max(norm_a, 1.0);
  const std::array<Complex, 3> shifts = {Complex(0.6180339887498949, 0.7861513777574233),
                                         Complex(-0.4472135954999579, 0.3090169943749474),
                                         Complex(1.3247179572447460, -0.5436890126920764)};
  for (const Complex unit_shift : shifts) {
    const Complex mu = (scale > 0.0 ? scale : 1.0) * unit_shift;
    DenseMatrix c = linear_combination(1.0, a, -mu, b);
    const double norm_c = frobenius_norm(c);
    try {
      const LuFactorization lu = lu_factor(std::move(c));
      if (!(lu.min_pivot > kReductionPivotGate * norm_c)) continue;
      SmallEigResult res = eig_dense(lu_solve(lu, b), options);
      double nu_max = 0.0;
      for (const auto& nu : res.values) nu_max = std::max(nu_max, std::abs(nu));
      const double inf = std::numeric_limits<double>::infinity();
      for (auto& nu : res.values) {
        if (nu_max == 0.0 || std::abs(nu) <= 1e-13 * nu_max) {
          nu = Complex(inf, 0.0);
        } else {
          nu = mu + 1.0 / nu;
        }
      }
      res.conditioning = Conditioning::IllConditioned;
      return res;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ExactSingular) throw;
    }
  }
  fail(ErrorKind::SingularPencilProjection,
       "projected pencil of size " + std::to_string(k) + " is singular for every tried shift");
}

}  // namespace cifeast
