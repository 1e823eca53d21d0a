#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cifeast/contour.hpp"
#include "cifeast/matrix.hpp"
#include "cifeast/subspace.hpp"

namespace cifeast {

enum class Scheme { Feast, Bfeast, Rfeast };

std::string_view to_string(Scheme scheme);
/// Accepts "feast", "bfeast", "rfeast"; throws InvalidArgument otherwise.
Scheme parse_scheme(std::string_view name);

struct SolverConfig {
  Index subspace = 0;                   // t, number of starting vectors
  Circle contour;
  int nodes = 16;                       // q
  double tolerance = 1e-8;              // epsilon, convergence target
  double filter_tolerance = 1e-2;       // eta, spurious-pair filter
  int max_iter = 10;
  std::uint64_t seed = 0;
  Scheme scheme = Scheme::Rfeast;
  std::optional<Index> expected_count;  // s, when known
  ParallelOptions parallel;

  /// Throws InvalidArgument unless 1 <= t <= n, 0 <= epsilon < eta, q >= 2
  /// and max_iter >= 0.
  void validate(Index n) const;
};

struct Eigenpair {
  Complex value;
  std::vector<Complex> vector;  // unit 2-norm, first significant entry real > 0
  double residual = 0.0;
  bool inside = false;
  bool filtered = false;        // inside and residual < eta
  bool converged = false;       // inside and residual < epsilon
  bool near_boundary = false;   // |value - center| within 1e-8 relative of the radius
};

using EigenpairSet = std::vector<Eigenpair>;

struct IterationRecord {
  int iteration = 0;
  double res_max = 0.0;         // +inf when nothing passed the filter
  Index filtered_count = 0;
  Index candidate_count = 0;
  Index converged_count = 0;
  Index rank = 0;
  double trace = 0.0;           // sum of inside Ritz values (FEAST only)
};

enum class SolveStatus { Converged, MaxIterReached };

std::string_view to_string(SolveStatus status);

struct SolveReport {
  Scheme scheme = Scheme::Rfeast;
  SolveStatus status = SolveStatus::MaxIterReached;
  int iterations = 0;
  std::vector<IterationRecord> history;
  EigenpairSet pairs;           // every candidate of the last iteration
  int singular_nodes = 0;

  /// Pairs inside the contour, sorted by real then imaginary part.
  EigenpairSet inside_pairs() const;
};

/// Snapshot handed to an observer after each iteration's extraction.
struct IterationView {
  int iteration;
  const SubspaceBasis& basis;
  const EigenpairSet& pairs;
  const IterationRecord& record;
};

using IterationObserver = std::function<void(const IterationView&)>;

/// Randomized left subspace (random R each iteration).
SolveReport rfeast(const MatrixPencil& pencil, const SolverConfig& config,
                   const std::optional<DenseMatrix>& y0 = std::nullopt,
                   const IterationObserver& observer = {});

/// Left subspace spanned by B U.
SolveReport bfeast(const MatrixPencil& pencil, const SolverConfig& config,
                   const std::optional<DenseMatrix>& y0 = std::nullopt,
                   const IterationObserver& observer = {});

/// Rayleigh-Ritz iteration for Hermitian pencils with positive definite B.
/// Throws NotHermitian when the pencil flags say otherwise.
SolveReport feast_hermitian(const MatrixPencil& pencil, const SolverConfig& config,
                            const std::optional<DenseMatrix>& y0 = std::nullopt,
                            const IterationObserver& observer = {});

/// Dispatches on config.scheme.
SolveReport solve(const MatrixPencil& pencil, const SolverConfig& config,
                  const std::optional<DenseMatrix>& y0 = std::nullopt,
                  const IterationObserver& observer = {});

/// ||A x - lambda B x|| / (||A x|| + ||B x||) with x normalized first.
/// Non-finite lambda gives +inf. Throws ZeroVector for x == 0.
double compute_residual(const MatrixPencil& pencil, Complex lambda, std::span<const Complex> x);

/// Recomputes inside / filtered / near_boundary flags.
EigenpairSet filter_pairs(EigenpairSet pairs, const Circle& circle, double eta);

/// Stochastic trace estimate of the quadrature projector:
/// round(Re trace(Y^* Q Y) / probes) for a Gaussian n x probes block Y.
Index estimate_count(const MatrixPencil& pencil, const ContourRule& rule, int probes = 20,
                     std::uint64_t seed = 0, ParallelOptions parallel = {});
Index estimate_count(const ShiftedFactorCache& cache, const MatrixPencil& pencil, int probes = 20,
                     std::uint64_t seed = 0);

/// Unrounded trace estimate behind estimate_count.
double estimate_trace(const ShiftedFactorCache& cache, const MatrixPencil& pencil, int probes,
                      std::uint64_t seed);

}  // namespace cifeast
