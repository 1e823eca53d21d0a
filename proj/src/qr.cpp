#include <algorithm>
#include <cmath>
#include <numeric>

#include "cifeast/dense.hpp"
#include "cifeast/error.hpp"

namespace cifeast {
namespace {

struct Reflector {
  std::vector<Complex> v;  // v[0] == 1, length n - j
  Complex tau;
};

// H = I - tau v v^*, chosen so that H^* x = beta e_1 with beta real.
Reflector make_reflector(std::span<Complex> x, double& beta) {
  Reflector h;
  h.v.assign(x.begin(), x.end());
  const Complex alpha = x[0];
  const double xnorm = norm2(x.subspan(1));
  if (xnorm == 0.0 && alpha.imag() == 0.0) {
    h.tau = 0.0;
    beta = alpha.real();
    h.v.assign(x.size(), Complex(0.0, 0.0));
    h.v[0] = 1.0;
    return h;
  }
  const double full = std::hypot(std::abs(alpha), xnorm);
  beta = alpha.real() >= 0.0 ? -full : full;
  h.tau = Complex((beta - alpha.real()) / beta, -alpha.imag() / beta);
  const Complex scale = 1.0 / (alpha - beta);
  for (Index i = 1; i < h.v.size(); ++i) h.v[i] *= scale;
  h.v[0] = 1.0;
  return h;
}

// a(j:, c) <- H^* a(j:, c) for columns c in [c0, a.cols()).
void apply_left_adjoint(const Reflector& h, DenseMatrix& a, Index j, Index c0) {
  if (h.tau == Complex(0.0, 0.0)) return;
  const Index len = h.v.size();
  const Complex tau_c = std::conj(h.tau);
  for (Index c = c0; c < a.cols(); ++c) {
    Complex* col = a.col(c).data() + j;
    Complex s(0.0, 0.0);
    for (Index i = 0; i < len; ++i) s += std::conj(h.v[i]) * col[i];
    s *= tau_c;
    for (Index i = 0; i < len; ++i) col[i] -= h.v[i] * s;
  }
}

QrFactorization householder_qr(const DenseMatrix& m, double rank_tol, bool pivot) {
  if (m.rows() < m.cols())
    fail(ErrorKind::DimensionMismatch, "qr needs rows >= cols");
  if (!(rank_tol > 0.0 && rank_tol < 1.0))
    fail(ErrorKind::InvalidArgument, "rank tolerance must lie in (0, 1)");

  const Index n = m.rows();
  const Index k = m.cols();
  DenseMatrix work = m;
  std::vector<Index> perm(k);
  std::iota(perm.begin(), perm.end(), Index{0});
  std::vector<Reflector> reflectors;
  reflectors.reserve(k);
  std::vector<double> betas(k, 0.0);

  for (Index j = 0; j < k; ++j) {
    if (pivot) {
      Index best = j;
      double best_norm = -1.0;
      for (Index c = j; c < k; ++c) {
        const double cn = norm2(work.col(c).subspan(j));
        if (cn > best_norm) {
          best_norm = cn;
          best = c;
        }
      }
      if (best != j) {
        std::swap(perm[j], perm[best]);
        std::swap_ranges(work.col(j).begin(), work.col(j).end(), work.col(best).begin());
      }
    }
    auto x = work.col(j).subspan(j);
    double beta = 0.0;
    reflectors.push_back(make_reflector(x, beta));
    betas[j] = beta;
    apply_left_adjoint(reflectors.back(), work, j, j + 1);
    x[0] = beta;
    for (Index i = 1; i < x.size(); ++i) x[i] = 0.0;
  }

  QrFactorization out;
  out.rank_tol = rank_tol;
  out.perm = std::move(perm);
  out.r = DenseMatrix(k, k);
  for (Index j = 0; j < k; ++j)
    for (Index i = 0; i <= j; ++i) out.r(i, j) = work(i, j);

  // Q = H_0 H_1 ... H_{k-1} [I_k; 0], accumulated from the right end.
  out.q = DenseMatrix(n, k);
  for (Index j = 0; j < k; ++j) out.q(j, j) = 1.0;
  for (Index j = k; j-- > 0;) {
    const Reflector& h = reflectors[j];
    if (h.tau == Complex(0.0, 0.0)) continue;
    const Index len = h.v.size();
    for (Index c = j; c < k; ++c) {
      Complex* col = out.q.col(c).data() + j;
      Complex s(0.0, 0.0);
      for (Index i = 0; i < len; ++i) s += std::conj(h.v[i]) * col[i];
      s *= h.tau;
      for (Index i = 0; i < len; ++i) col[i] -= h.v[i] * s;
    }
  }

  // Nonnegative real diagonal.
  for (Index j = 0; j < k; ++j) {
    if (betas[j] < 0.0) {
      for (Index c = j; c < k; ++c) out.r(j, c) = -out.r(j, c);
      for (auto& z : out.q.col(j)) z = -z;
    }
  }

  double max_diag = 0.0;
  for (Index j = 0; j < k; ++j) max_diag = std::max(max_diag, std::abs(out.r(j, j)));
  out.rank = 0;
  if (max_diag > 0.0) {
    for (Index j = 0; j < k; ++j)
      if (std::abs(out.r(j, j)) > rank_tol * max_diag) ++out.rank;
  }
  return out;
}

}  // namespace

QrFactorization qr_thin(const DenseMatrix& m, double rank_tol) {
  return householder_qr(m, rank_tol, false);
}

QrFactorization qr_pivoted(const DenseMatrix& m, double rank_tol) {
  return householder_qr(m, rank_tol, true);
}

}  // namespace cifeast
