#include "cifeast/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cifeast/dense.hpp"
#include "cifeast/error.hpp"
#include "cifeast/random.hpp"

namespace cifeast {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBoundaryBand = 1e-8;
constexpr double kPhaseFloor = 1e-8;

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

bool value_less(const Eigenpair& a, const Eigenpair& b) {
  if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
  return a.value.imag() < b.value.imag();
}

// Unit norm, first entry above kPhaseFloor * max|x_i| rotated to the positive real axis.
void normalize_phase(std::vector<Complex>& x) {
  const double nrm = norm2(x);
  if (!(nrm > 0.0)) return;
  double peak = 0.0;
  for (const Complex v : x) peak = std::max(peak, std::abs(v));
  std::size_t pivot = 0;
  while (pivot + 1 < x.size() && !(std::abs(x[pivot]) > kPhaseFloor * peak)) ++pivot;
  const double mag = std::abs(x[pivot]);
  const Complex rot = std::conj(x[pivot]) / (mag * nrm);
  for (Complex& v : x) v *= rot;
  x[pivot] = Complex(mag / nrm, 0.0);
}

// ||ax - lambda bx|| / (||ax|| + ||bx||); the ratio is invariant to the scale of x.
double residual_from(std::span<const Complex> ax, std::span<const Complex> bx, Complex lambda) {
  if (!finite(lambda)) return kInf;
  std::vector<Complex> r(ax.size());
  for (std::size_t i = 0; i < ax.size(); ++i) r[i] = ax[i] - lambda * bx[i];
  const double denom = norm2(ax) + norm2(bx);
  if (!(denom > 0.0)) return kInf;
  return norm2(r) / denom;
}

void mark(Eigenpair& p, const Circle& circle, double eta) {
  const double dist = std::abs(p.value - circle.center);
  const bool ok = finite(p.value);
  p.inside = ok && dist < circle.radius;
  p.near_boundary = ok && dist >= circle.radius * (1.0 - kBoundaryBand) &&
                    dist <= circle.radius * (1.0 + kBoundaryBand);
  p.filtered = p.inside && p.residual < eta;
}

double res_max(const EigenpairSet& pairs, std::optional<Index> s) {
  std::vector<double> res;
  for (const auto& p : pairs)
    if (p.filtered) res.push_back(p.residual);
  if (res.empty()) return kInf;
  std::sort(res.begin(), res.end());
  if (s && *s >= 1 && res.size() >= *s) return res[*s - 1];
  return res.back();
}

SolveReport run(const MatrixPencil& pencil, const SolverConfig& config, Scheme scheme,
                const std::optional<DenseMatrix>& y0, const IterationObserver& observer) {
  const Index n = pencil.size();
  config.validate(n);
  if (y0 && (y0->rows() != n || y0->cols() != config.subspace))
    fail(ErrorKind::DimensionMismatch, "starting block must be n x t");

  SolveReport report;
  report.scheme = scheme;

  Rng rng(config.seed);
  const ContourRule rule = build_rule(config.contour, config.nodes);
  const ShiftedFactorCache cache = build_cache(pencil, rule, config.parallel);
  report.singular_nodes = cache.singular_count();

  DenseMatrix y = y0 ? *y0 : gaussian_matrix(n, config.subspace, rng);
  const auto& s = config.expected_count;
  std::optional<Index> previous_filtered;
  double previous_trace = 0.0;

  for (int k = 1; k <= config.max_iter; ++k) {
    // FEAST integrates the B-weighted block directly (with_b = false, Y = B X).
    const DenseMatrix u = apply_projector(cache, pencil, y, scheme != Scheme::Feast);
    const SubspaceBasis basis = orthonormalize(u, k);
    if (basis.rank == 0 || (s && basis.rank < *s))
      fail(ErrorKind::SubspaceCollapse,
           "projected subspace has rank " + std::to_string(basis.rank) + " at iteration " +
               std::to_string(k) + (s ? ", fewer than the " + std::to_string(*s) + " expected" : ""));
    const DenseMatrix& u1 = basis.basis;
    const Index r = u1.cols();
    const DenseMatrix au1 = pencil.apply_a(u1);
    const DenseMatrix bu1 = pencil.apply_b(u1);

    DenseMatrix u2;
    switch (scheme) {
      case Scheme::Rfeast:
        u2 = qr_thin(gaussian_matrix(n, r, rng)).q;
        break;
      case Scheme::Bfeast:
        u2 = qr_thin(bu1).q;
        break;
      case Scheme::Feast:
        u2 = u1;
        break;
    }
    const SmallEigResult small =
        eig_generalized(adjoint_times(u2, au1), adjoint_times(u2, bu1));

    const DenseMatrix ax = au1 * small.vectors;
    const DenseMatrix bx = bu1 * small.vectors;
    const DenseMatrix x = u1 * small.vectors;

    EigenpairSet pairs(r);
    for (Index i = 0; i < r; ++i) {
      Eigenpair& p = pairs[i];
      p.value = small.values[i];
      auto col = x.col(i);
      p.vector.assign(col.begin(), col.end());
      normalize_phase(p.vector);
      p.residual = residual_from(ax.col(i), bx.col(i), p.value);
      mark(p, config.contour, config.filter_tolerance);
      p.converged = p.inside && p.residual < config.tolerance;
    }
    std::stable_sort(pairs.begin(), pairs.end(), value_less);

    IterationRecord rec;
    rec.iteration = k;
    rec.candidate_count = r;
    rec.rank = basis.rank;
    for (const auto& p : pairs) {
      rec.filtered_count += p.filtered ? 1 : 0;
      rec.converged_count += p.converged ? 1 : 0;
      if (p.inside) rec.trace += p.value.real();
    }
    rec.res_max = res_max(pairs, s);
    report.history.push_back(rec);
    report.iterations = k;
    report.pairs = pairs;
    if (observer) observer(IterationView{k, basis, report.pairs, report.history.back()});

    bool done = false;
    if (s) {
      done = rec.converged_count >= *s;
    } else {
      done = previous_filtered && *previous_filtered == rec.filtered_count &&
             rec.converged_count == rec.filtered_count;
    }
    if (scheme == Scheme::Feast)
      done = done && k >= 2 &&
             std::abs(rec.trace - previous_trace) <=
                 config.tolerance * std::max(std::abs(rec.trace), config.contour.radius);
    if (done) {
      report.status = SolveStatus::Converged;
      break;
    }
    previous_filtered = rec.filtered_count;
    previous_trace = rec.trace;

    if (scheme == Scheme::Feast) {
      DenseMatrix next(n, r);
      for (Index i = 0; i < r; ++i) next.set_column(i, pairs[i].vector);
      y = pencil.apply_b(next);
    } else {
      y = u1;
    }
  }
  return report;
}

}  // namespace

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::Feast: return "feast";
    case Scheme::Bfeast: return "bfeast";
    case Scheme::Rfeast: return "rfeast";
  }
  return "unknown";
}

Scheme parse_scheme(std::string_view name) {
  if (name == "feast") return Scheme::Feast;
  if (name == "bfeast") return Scheme::Bfeast;
  if (name == "rfeast") return Scheme::Rfeast;
  fail(ErrorKind::InvalidArgument, "unknown scheme '" + std::string(name) + "'");
}

std::string_view to_string(SolveStatus status) {
  return status == SolveStatus::Converged ? "converged" : "max_iter_reached";
}

void SolverConfig::validate(Index n) const {
  if (subspace < 1 || subspace > n)
    fail(ErrorKind::InvalidArgument, "subspace size t must lie in [1, " + std::to_string(n) +
                                         "], got " + std::to_string(subspace));
  if (!(tolerance >= 0.0) || !(tolerance < filter_tolerance) || !std::isfinite(filter_tolerance))
    fail(ErrorKind::InvalidArgument, "tolerances must satisfy 0 <= epsilon < eta");
  if (nodes < 2 || nodes > kMaxQuadratureNodes)
    fail(ErrorKind::InvalidArgument, "quadrature needs between 2 and 512 nodes");
  if (max_iter < 0) fail(ErrorKind::InvalidArgument, "max_iter must be nonnegative");
  if (expected_count && *expected_count > subspace)
    fail(ErrorKind::InvalidArgument, "expected count exceeds the subspace size");
  if (!(contour.radius > 0.0)) fail(ErrorKind::InvalidArgument, "contour radius must be positive");
}

EigenpairSet SolveReport::inside_pairs() const {
  EigenpairSet out;
  for (const auto& p : pairs)
    if (p.inside) out.push_back(p);
  std::stable_sort(out.begin(), out.end(), value_less);
  return out;
}

SolveReport rfeast(const MatrixPencil& pencil, const SolverConfig& config,
                   const std::optional<DenseMatrix>& y0, const IterationObserver& observer) {
  return run(pencil, config, Scheme::Rfeast, y0, observer);
}

SolveReport bfeast(const MatrixPencil& pencil, const SolverConfig& config,
                   const std::optional<DenseMatrix>& y0, const IterationObserver& observer) {
  return run(pencil, config, Scheme::Bfeast, y0, observer);
}

SolveReport feast_hermitian(const MatrixPencil& pencil, const SolverConfig& config,
                            const std::optional<DenseMatrix>& y0,
                            const IterationObserver& observer) {
  if (!pencil.hermitian() || !pencil.b_definite())
    fail(ErrorKind::NotHermitian,
         "FEAST needs Hermitian A and Hermitian positive definite B; use bfeast or rfeast");
  if (config.contour.center.imag() != 0.0)
    fail(ErrorKind::InvalidArgument, "FEAST needs a contour centered on the real axis");
  return run(pencil, config, Scheme::Feast, y0, observer);
}

SolveReport solve(const MatrixPencil& pencil, const SolverConfig& config,
                  const std::optional<DenseMatrix>& y0, const IterationObserver& observer) {
  switch (config.scheme) {
    case Scheme::Feast: return feast_hermitian(pencil, config, y0, observer);
    case Scheme::Bfeast: return bfeast(pencil, config, y0, observer);
    case Scheme::Rfeast: break;
  }
  return rfeast(pencil, config, y0, observer);
}

double compute_residual(const MatrixPencil& pencil, Complex lambda, std::span<const Complex> x) {
  if (x.size() != pencil.size())
    fail(ErrorKind::DimensionMismatch, "vector length does not match the pencil");
  const double nrm = norm2(x);
  if (!(nrm > 0.0)) fail(ErrorKind::ZeroVector, "residual of a zero vector");
  if (!finite(lambda)) return kInf;
  std::vector<Complex> unit(x.begin(), x.end());
  for (Complex& v : unit) v /= nrm;
  const auto ax = multiply(pencil.a(), unit);
  const auto bx = pencil.identity_b() ? unit : multiply(pencil.b_dense(), unit);
  return residual_from(ax, bx, lambda);
}

EigenpairSet filter_pairs(EigenpairSet pairs, const Circle& circle, double eta) {
  for (auto& p : pairs) mark(p, circle, eta);
  return pairs;
}

double estimate_trace(const ShiftedFactorCache& cache, const MatrixPencil& pencil, int probes,
                      std::uint64_t seed) {
  if (probes < 1) fail(ErrorKind::InvalidArgument, "trace estimate needs at least one probe");
  Rng rng(seed);
  const DenseMatrix y = gaussian_matrix(pencil.size(), static_cast<Index>(probes), rng);
  const DenseMatrix qy = apply_projector(cache, pencil, y, true);
  Complex sum(0.0, 0.0);
  for (Index j = 0; j < y.cols(); ++j) sum += dot(y.col(j), qy.col(j));
  return sum.real() / probes;
}

Index estimate_count(const ShiftedFactorCache& cache, const MatrixPencil& pencil, int probes,
                     std::uint64_t seed) {
  const double tr = estimate_trace(cache, pencil, probes, seed);
  return tr <= 0.0 ? 0 : static_cast<Index>(std::llround(tr));
}

Index estimate_count(const MatrixPencil& pencil, const ContourRule& rule, int probes,
                     std::uint64_t seed, ParallelOptions parallel) {
  return estimate_count(build_cache(pencil, rule, parallel), pencil, probes, seed);
}

}  // namespace cifeast
