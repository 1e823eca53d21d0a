#include "cifeast/subspace.hpp"

#include <cmath>
#include <string>

#include "cifeast/error.hpp"
#include "parallel.hpp"

namespace cifeast {
namespace {

bool is_hermitian(const DenseMatrix& m) {
  if (!m.square()) return false;
  double diff = 0.0;
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) {
      const double d = std::abs(m(i, j) - std::conj(m(j, i)));
      diff += d * d;
    }
  return std::sqrt(diff) <= kHermitianTol * frobenius_norm(m);
}

bool cholesky_succeeds(const DenseMatrix& m) {
  const Index n = m.rows();
  DenseMatrix l(n, n);
  for (Index j = 0; j < n; ++j) {
    double d = m(j, j).real();
    for (Index k = 0; k < j; ++k) d -= std::norm(l(j, k));
    if (!(d > 0.0)) return false;
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (Index i = j + 1; i < n; ++i) {
      Complex s = m(i, j);
      for (Index k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
      l(i, j) = s / ljj;
    }
  }
  return true;
}

}  // namespace

MatrixPencil MatrixPencil::standard(DenseMatrix a) { return MatrixPencil(std::move(a), std::nullopt); }

MatrixPencil::MatrixPencil(DenseMatrix a, DenseMatrix b)
    : MatrixPencil(std::move(a), std::optional<DenseMatrix>(std::move(b))) {}

MatrixPencil::MatrixPencil(DenseMatrix a, std::optional<DenseMatrix> b)
    : a_(std::move(a)), b_(std::move(b)) {
  if (!a_.square()) fail(ErrorKind::DimensionMismatch, "pencil matrix A must be square");
  if (b_ && (b_->rows() != a_.rows() || b_->cols() != a_.cols()))
    fail(ErrorKind::DimensionMismatch, "pencil matrices A and B differ in size");
  if (!a_.all_finite() || (b_ && !b_->all_finite()))
    fail(ErrorKind::InvalidArgument, "pencil has non-finite entries");
  real_ = a_.is_real() && (!b_ || b_->is_real());
  hermitian_ = is_hermitian(a_) && (!b_ || is_hermitian(*b_));
  b_definite_ = hermitian_ && (!b_ || cholesky_succeeds(*b_));
}

DenseMatrix MatrixPencil::b_dense() const {
  return b_ ? *b_ : DenseMatrix::identity(a_.rows());
}

DenseMatrix MatrixPencil::shifted(Complex z) const {
  DenseMatrix m = a_;
  m *= -1.0;
  if (b_) {
    auto dst = m.entries();
    auto src = b_->entries();
    for (Index k = 0; k < dst.size(); ++k) dst[k] += z * src[k];
  } else {
    for (Index i = 0; i < m.rows(); ++i) m(i, i) += z;
  }
  return m;
}

int ShiftedFactorCache::singular_count() const noexcept {
  int count = 0;
  for (const auto& node : nodes_) count += node.singular ? 1 : 0;
  return count;
}

DenseMatrix ShiftedFactorCache::solve(std::size_t node, const DenseMatrix& rhs) const {
  const Node& nd = nodes_.at(node);
  if (nd.singular)
    fail(ErrorKind::ExactSingular, "quadrature node " + std::to_string(node) + " is singular");
  const LuFactorization& lu = factors_[static_cast<std::size_t>(nd.factor)];
  return nd.conjugated ? lu_solve_conjugate(lu, rhs) : lu_solve(lu, rhs);
}

ShiftedFactorCache build_cache(const MatrixPencil& pencil, const ContourRule& rule,
                               ParallelOptions parallel) {
  const std::size_t q = rule.points.size();
  ShiftedFactorCache cache;
  cache.rule_ = rule;
  cache.threads_ = detail::resolve_threads(parallel.threads);
  cache.nodes_.resize(q);

  const bool paired = pencil.is_real() && rule.circle.center.imag() == 0.0;
  // owner[j]: the node whose factorization node j uses.
  std::vector<std::size_t> owner(q);
  std::vector<std::size_t> to_factor;
  for (std::size_t j = 0; j < q; ++j) {
    const std::size_t mirror = q - 1 - j;
    if (paired && mirror < j && rule.points[j] == std::conj(rule.points[mirror])) {
      owner[j] = mirror;
      cache.nodes_[j].conjugated = true;
    } else {
      owner[j] = j;
      to_factor.push_back(j);
    }
  }

  std::vector<std::optional<LuFactorization>> slots(to_factor.size());
  std::vector<double> ratios(to_factor.size(), 0.0);
  detail::parallel_for(to_factor.size(), cache.threads_, [&](std::size_t t) {
    DenseMatrix m = pencil.shifted(rule.points[to_factor[t]]);
    const double norm = frobenius_norm(m);
    try {
      LuFactorization lu = lu_factor(std::move(m));
      ratios[t] = norm > 0.0 ? lu.min_pivot / norm : 0.0;
      if (ratios[t] >= kSingularNodeTol) slots[t] = std::move(lu);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ExactSingular) throw;
      ratios[t] = 0.0;
    }
  });

  std::vector<int> factor_of_node(q, -1);
  std::vector<double> ratio_of_node(q, 0.0);
  for (std::size_t t = 0; t < to_factor.size(); ++t) {
    ratio_of_node[to_factor[t]] = ratios[t];
    if (slots[t]) {
      factor_of_node[to_factor[t]] = static_cast<int>(cache.factors_.size());
      cache.factors_.push_back(std::move(*slots[t]));
    }
  }
  for (std::size_t j = 0; j < q; ++j) {
    auto& node = cache.nodes_[j];
    node.factor = factor_of_node[owner[j]];
    node.pivot_ratio = ratio_of_node[owner[j]];
    node.singular = node.factor < 0;
  }
  if (cache.singular_count() == static_cast<int>(q))
    fail(ErrorKind::AllNodesSingular,
         "every quadrature node is singular: the contour crosses the spectrum or the pencil is "
         "not regular");
  return cache;
}

DenseMatrix apply_projector(const ShiftedFactorCache& cache, const MatrixPencil& pencil,
                            const DenseMatrix& y, bool with_b) {
  if (y.rows() != pencil.size())
    fail(ErrorKind::DimensionMismatch, "projector input has " + std::to_string(y.rows()) +
                                           " rows, pencil has size " +
                                           std::to_string(pencil.size()));
  const DenseMatrix rhs = with_b ? pencil.apply_b(y) : y;
  const bool real_rhs = rhs.is_real();
  const auto& nodes = cache.nodes();
  const auto& weights = cache.rule().weights;

  // Group nodes by shared factorization; groups are reduced in factor order.
  std::vector<std::vector<std::size_t>> groups(cache.factors().size());
  for (std::size_t j = 0; j < nodes.size(); ++j)
    if (!nodes[j].singular) groups[static_cast<std::size_t>(nodes[j].factor)].push_back(j);

  std::vector<DenseMatrix> partial(groups.size());
  detail::parallel_for(groups.size(), cache.threads(), [&](std::size_t g) {
    const auto& members = groups[g];
    DenseMatrix acc(rhs.rows(), rhs.cols());
    if (members.size() == 2 && real_rhs) {
      // Conjugate pair with a real right-hand side: X_mirror = conj(X).
      const std::size_t direct = nodes[members[0]].conjugated ? members[1] : members[0];
      const std::size_t mirror = direct == members[0] ? members[1] : members[0];
      const DenseMatrix x = cache.solve(direct, rhs);
      const Complex wd = weights[direct];
      const Complex wm = weights[mirror];
      auto dst = acc.entries();
      auto src = x.entries();
      for (Index k = 0; k < dst.size(); ++k) dst[k] = wd * src[k] + wm * std::conj(src[k]);
    } else {
      for (const std::size_t j : members) {
        const DenseMatrix x = cache.solve(j, rhs);
        auto dst = acc.entries();
        auto src = x.entries();
        const Complex w = weights[j];
        for (Index k = 0; k < dst.size(); ++k) dst[k] += w * src[k];
      }
    }
    partial[g] = std::move(acc);
  });

  DenseMatrix u(rhs.rows(), rhs.cols());
  for (const auto& p : partial) u += p;
  return u;
}

SubspaceBasis orthonormalize(const DenseMatrix& u_raw, int iteration, double rank_tol) {
  SubspaceBasis out;
  out.raw = u_raw;
  out.iteration = iteration;
  QrFactorization qr = qr_thin(u_raw, rank_tol);
  if (qr.rank < u_raw.cols()) {
    qr = qr_pivoted(u_raw, rank_tol);
    out.truncated = true;
    out.basis = qr.q.columns(0, qr.rank);
  } else {
    out.basis = std::move(qr.q);
  }
  out.rank = qr.rank;
  out.r = std::move(qr.r);
  return out;
}

}  // namespace cifeast
