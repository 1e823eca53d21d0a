#include "cifeast/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <tuple>

#include "cifeast/dense.hpp"
#include "cifeast/error.hpp"
#include "cifeast/random.hpp"

namespace cifeast {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kInfiniteEigenvalueFloor = 1e-13;

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

using WideComplex = std::complex<long double>;

// a * b accumulated in long double, then rounded once.
DenseMatrix wide_product(const DenseMatrix& a, const DenseMatrix& b) {
  const Index m = a.rows();
  const Index k = a.cols();
  DenseMatrix out(m, b.cols());
  std::vector<WideComplex> acc(m);
  for (Index j = 0; j < b.cols(); ++j) {
    std::fill(acc.begin(), acc.end(), WideComplex(0.0L));
    for (Index p = 0; p < k; ++p) {
      const WideComplex bp(b(p, j).real(), b(p, j).imag());
      if (bp == WideComplex(0.0L)) continue;
      for (Index i = 0; i < m; ++i) acc[i] += WideComplex(a(i, p).real(), a(i, p).imag()) * bp;
    }
    for (Index i = 0; i < m; ++i)
      out(i, j) = Complex(static_cast<double>(acc[i].real()), static_cast<double>(acc[i].imag()));
  }
  return out;
}

// U1 diag(sigma) U2^* and its inverse U2 diag(1/sigma) U1^*.
void conditioned_pair(Index n, double conditioning, Rng& rng, DenseMatrix& m, DenseMatrix& inv) {
  const DenseMatrix u1 = random_unitary(n, rng);
  const DenseMatrix u2 = random_unitary(n, rng);
  DenseMatrix left = u1;
  DenseMatrix right = u2;
  const double top = std::log(conditioning);
  for (Index j = 0; j < n; ++j) {
    const double frac = n > 1 ? static_cast<double>(j) / static_cast<double>(n - 1) : 0.0;
    const double sigma = std::exp(top * frac);
    for (Complex& v : left.col(j)) v *= sigma;
    for (Complex& v : right.col(j)) v /= sigma;
  }
  m = wide_product(left, u2.adjoint());
  inv = wide_product(right, u1.adjoint());
}

}  // namespace

Index SyntheticPencil::finite_dimension() const {
  Index d = 0;
  for (const auto& b : blocks) d += b.size;
  return d;
}

Index SyntheticPencil::size() const {
  Index n = finite_dimension();
  for (const Index d : nilpotent) n += d;
  return n;
}

std::vector<Complex> SyntheticPencil::planted() const {
  std::vector<Complex> out;
  for (const auto& b : blocks) out.insert(out.end(), b.size, b.value);
  return out;
}

Index SyntheticPencil::inside_count(const Circle& circle) const {
  Index s = 0;
  for (const auto& b : blocks)
    if (circle.contains(b.value)) s += b.size;
  return s;
}

DenseMatrix SyntheticPencil::weierstrass_a() const {
  const Index n = size();
  DenseMatrix w = DenseMatrix::identity(n);
  Index at = 0;
  for (const auto& b : blocks) {
    for (Index i = 0; i < b.size; ++i) {
      w(at + i, at + i) = b.value;
      if (i + 1 < b.size) w(at + i, at + i + 1) = 1.0;
    }
    at += b.size;
  }
  return w;
}

DenseMatrix SyntheticPencil::weierstrass_b() const {
  const Index n = size();
  DenseMatrix w = DenseMatrix::identity(n);
  Index at = finite_dimension();
  for (const Index d : nilpotent) {
    for (Index i = 0; i < d; ++i) {
      w(at + i, at + i) = 0.0;
      if (i + 1 < d) w(at + i, at + i + 1) = 1.0;
    }
    at += d;
  }
  return w;
}

std::vector<Complex> SyntheticPencil::eigenvector(Index block) const {
  if (block >= blocks.size())
    fail(ErrorKind::IndexOutOfRange, "block index " + std::to_string(block) + " out of range");
  Index at = 0;
  for (Index i = 0; i < block; ++i) at += blocks[i].size;
  const auto col = s.col(at);
  return {col.begin(), col.end()};
}

SyntheticPencil make_synthetic(const std::vector<JordanBlock>& blocks,
                               const std::vector<Index>& nilpotent, Index n, double conditioning,
                               std::uint64_t seed, bool identity_transforms) {
  Index total = 0;
  for (const auto& b : blocks) {
    if (b.size == 0) fail(ErrorKind::InvalidArgument, "Jordan blocks need positive size");
    if (!finite(b.value)) fail(ErrorKind::InvalidArgument, "planted eigenvalues must be finite");
    total += b.size;
  }
  for (const Index d : nilpotent) {
    if (d == 0) fail(ErrorKind::InvalidArgument, "nilpotent blocks need positive size");
    total += d;
  }
  if (total != n || n == 0)
    fail(ErrorKind::SizeMismatch, "block sizes add up to " + std::to_string(total) +
                                      " but the pencil size is " + std::to_string(n));
  if (!(conditioning >= 1.0) || !std::isfinite(conditioning))
    fail(ErrorKind::InvalidArgument, "conditioning must be a finite value >= 1");

  SyntheticPencil out;
  out.blocks = blocks;
  out.nilpotent = nilpotent;
  if (identity_transforms) {
    out.s = out.t = out.s_inv = out.t_inv = DenseMatrix::identity(n);
  } else {
    Rng rng(seed);
    conditioned_pair(n, conditioning, rng, out.s, out.s_inv);
    conditioned_pair(n, conditioning, rng, out.t, out.t_inv);
  }
  // Extended accumulation keeps T A S within a few ulps of the canonical form times cond(S) cond(T).
  out.a = wide_product(out.t_inv, wide_product(out.weierstrass_a(), out.s_inv));
  out.b = wide_product(out.t_inv, wide_product(out.weierstrass_b(), out.s_inv));
  return out;
}

SyntheticPencil make_disk_synthetic(Index n, Index inside, const Circle& circle,
                                    double conditioning, std::uint64_t seed, double inner,
                                    double outer_min, double outer_max) {
  if (inside > n) fail(ErrorKind::SizeMismatch, "more inside eigenvalues than the pencil size");
  if (!(inner > 0.0 && inner < 1.0 && outer_min > 1.0 && outer_max >= outer_min))
    fail(ErrorKind::InvalidArgument, "need 0 < inner < 1 < outer_min <= outer_max");
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<JordanBlock> blocks;
  blocks.reserve(n);
  for (Index i = 0; i < n; ++i) {
    const double radius = i < inside
                              ? inner * std::sqrt(unit(rng))
                              : outer_min + (outer_max - outer_min) * unit(rng);
    const double angle = two_pi * unit(rng);
    blocks.push_back({circle.center + circle.radius * std::polar(radius, angle), 1});
  }
  return make_synthetic(blocks, {}, n, conditioning, rng());
}

ReferenceSpectrum reference_solve(const MatrixPencil& pencil, ReferenceOptions options) {
  const Index n = pencil.size();
  if (n > options.dense_limit)
    fail(ErrorKind::DenseLimitExceeded, "pencil size " + std::to_string(n) +
                                            " exceeds the dense reference limit " +
                                            std::to_string(options.dense_limit));
  const EigOptions eo{options.want_vectors};
  ReferenceSpectrum out;
  out.method = SpectrumMethod::DenseReduction;

  if (pencil.identity_b()) {
    SmallEigResult r = eig_dense(pencil.a(), eo);
    out.values = std::move(r.values);
    out.vectors = std::move(r.vectors);
    out.route = ReductionRoute::Standard;
    return out;
  }

  const DenseMatrix b = pencil.b_dense();
  auto gated_lu = [](const DenseMatrix& m) -> std::optional<LuFactorization> {
    const double norm = frobenius_norm(m);
    try {
      LuFactorization lu = lu_factor(m);
      if (norm > 0.0 && lu.min_pivot >= kReductionPivotGate * norm) return lu;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ExactSingular) throw;
    }
    return std::nullopt;
  };

  if (auto lu = gated_lu(b)) {
    SmallEigResult r = eig_dense(lu_solve(*lu, pencil.a()), eo);
    out.values = std::move(r.values);
    out.vectors = std::move(r.vectors);
    out.route = ReductionRoute::BInversion;
    return out;
  }
  if (auto lu = gated_lu(pencil.a())) {
    SmallEigResult r = eig_dense(lu_solve(*lu, b), eo);
    double peak = 0.0;
    for (const Complex v : r.values) peak = std::max(peak, std::abs(v));
    out.values.reserve(r.values.size());
    for (const Complex v : r.values)
      out.values.push_back(std::abs(v) <= kInfiniteEigenvalueFloor * peak
                               ? Complex(kInf, 0.0)
                               : 1.0 / v);
    out.vectors = std::move(r.vectors);
    out.route = ReductionRoute::ReversedPencil;
    return out;
  }
  fail(ErrorKind::BothReductionsIllConditioned,
       "neither A nor B factors with a usable pivot; the reference solver cannot reduce this "
       "pencil");
}

ReferenceSpectrum known_spectrum(const SyntheticPencil& synthetic) {
  ReferenceSpectrum out;
  out.method = SpectrumMethod::KnownSynthetic;
  out.values = synthetic.planted();
  const Index n = synthetic.size();
  out.values.resize(n, Complex(kInf, 0.0));
  out.vectors = synthetic.s;
  return out;
}

Index count_inside(const ReferenceSpectrum& spectrum, const Circle& circle) {
  Index c = 0;
  for (const Complex v : spectrum.values)
    if (finite(v) && circle.contains(v)) ++c;
  return c;
}

Index count_near_boundary(const ReferenceSpectrum& spectrum, const Circle& circle) {
  Index c = 0;
  for (const Complex v : spectrum.values) {
    if (!finite(v)) continue;
    const double d = std::abs(v - circle.center);
    if (d >= circle.radius * (1.0 - 1e-8) && d <= circle.radius * (1.0 + 1e-8)) ++c;
  }
  return c;
}

double predict_rate(const ReferenceSpectrum& spectrum, const ContourRule& rule, Index t, Index j) {
  const Index n = spectrum.values.size();
  if (t < 1 || t > n)
    fail(ErrorKind::IndexOutOfRange, "t = " + std::to_string(t) + " outside [1, " +
                                         std::to_string(n) + "]");
  if (j >= n)
    fail(ErrorKind::IndexOutOfRange, "eigenvalue index " + std::to_string(j) + " out of range");
  std::vector<double> mags(n);
  for (Index i = 0; i < n; ++i)
    mags[i] = finite(spectrum.values[i]) ? std::abs(filter_eval(rule, spectrum.values[i]).value)
                                         : 0.0;
  const double own = mags[j];
  std::sort(mags.begin(), mags.end(), std::greater<>());
  return mags[t - 1] / own;
}

SpectrumMatch match_spectra(const std::vector<Complex>& left, const std::vector<Complex>& right,
                            double radius) {
  std::vector<std::tuple<double, Index, Index>> candidates;
  for (Index i = 0; i < left.size(); ++i)
    for (Index k = 0; k < right.size(); ++k) {
      const double d = std::abs(left[i] - right[k]);
      if (d <= radius) candidates.emplace_back(d, i, k);
    }
  std::sort(candidates.begin(), candidates.end());
  std::vector<bool> used_left(left.size(), false);
  std::vector<bool> used_right(right.size(), false);
  SpectrumMatch out;
  for (const auto& [d, i, k] : candidates) {
    if (used_left[i] || used_right[k]) continue;
    used_left[i] = used_right[k] = true;
    ++out.matched;
    out.max_distance = std::max(out.max_distance, d);
  }
  for (Index i = 0; i < left.size(); ++i)
    if (!used_left[i]) out.unmatched_left.push_back(left[i]);
  for (Index k = 0; k < right.size(); ++k)
    if (!used_right[k]) out.unmatched_right.push_back(right[k]);
  return out;
}

}  // namespace cifeast
