#pragma once

#include <optional>
#include <vector>

#include "cifeast/contour.hpp"
#include "cifeast/dense.hpp"
#include "cifeast/matrix.hpp"

namespace cifeast {

/// The pair (A, B) of A x = lambda B x. A standard problem keeps B implicit.
class MatrixPencil {
 public:
  /// B = I, never materialized.
  static MatrixPencil standard(DenseMatrix a);
  MatrixPencil(DenseMatrix a, DenseMatrix b);

  Index size() const noexcept { return a_.rows(); }
  const DenseMatrix& a() const noexcept { return a_; }
  bool identity_b() const noexcept { return !b_.has_value(); }
  /// Explicit B; builds the identity for standard problems.
  DenseMatrix b_dense() const;

  /// ||A - A^*||_F <= 1e-12 ||A||_F and the same for B.
  bool hermitian() const noexcept { return hermitian_; }
  /// Hermitian B with a successful Cholesky factorization.
  bool b_definite() const noexcept { return b_definite_; }
  bool is_real() const noexcept { return real_; }

  DenseMatrix apply_a(const DenseMatrix& x) const { return a_ * x; }
  DenseMatrix apply_b(const DenseMatrix& x) const { return b_ ? *b_ * x : x; }
  /// z B - A.
  DenseMatrix shifted(Complex z) const;

 private:
  MatrixPencil(DenseMatrix a, std::optional<DenseMatrix> b);

  DenseMatrix a_;
  std::optional<DenseMatrix> b_;
  bool hermitian_ = false;
  bool b_definite_ = false;
  bool real_ = false;
};

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kSingularNodeTol = 1e-13;

/// Thread fan-out over quadrature nodes. 0 means hardware concurrency.
struct ParallelOptions {
  unsigned threads = 0;
};

/// LU factorizations of z_j B - A for every node of a rule, computed once and
/// reused for all outer iterations.
///
/// For a real pencil on a circle centred on the real axis the nodes come in
/// conjugate pairs; the pair shares one factorization and the mirrored node
/// is solved through the conjugate.
class ShiftedFactorCache {
 public:
  struct Node {
    int factor = -1;          // index into factors(); -1 when singular
    bool conjugated = false;  // node matrix is conj of the stored factorization's
    bool singular = false;
    double pivot_ratio = 0.0;  // min pivot / ||z_j B - A||_F
  };

  const ContourRule& rule() const noexcept { return rule_; }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const std::vector<LuFactorization>& factors() const noexcept { return factors_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  int singular_count() const noexcept;
  unsigned threads() const noexcept { return threads_; }

  /// (z_j B - A)^{-1} rhs. Throws ExactSingular for a flagged node.
  DenseMatrix solve(std::size_t node, const DenseMatrix& rhs) const;

 private:
  friend ShiftedFactorCache build_cache(const MatrixPencil&, const ContourRule&,
                                        ParallelOptions);
  ContourRule rule_;
  std::vector<Node> nodes_;
  std::vector<LuFactorization> factors_;
  unsigned threads_ = 1;
};

/// Nodes whose smallest pivot falls below 1e-13 ||z_j B - A||_F are flagged
/// singular and skipped later. Throws AllNodesSingular if none survive.
ShiftedFactorCache build_cache(const MatrixPencil& pencil, const ContourRule& rule,
                               ParallelOptions parallel = {});

/// sum_j w_j (z_j B - A)^{-1} (B Y if with_b else Y), singular nodes skipped.
/// Partial sums are reduced in a fixed order, so the result does not depend on
/// thread scheduling.
DenseMatrix apply_projector(const ShiftedFactorCache& cache, const MatrixPencil& pencil,
                            const DenseMatrix& y, bool with_b);

struct SubspaceBasis {
  DenseMatrix raw;     // U as produced by the projector
  DenseMatrix basis;   // orthonormal, n x rank
  DenseMatrix r;       // triangular factor of the QR used
  Index rank = 0;
  int iteration = 0;
  bool truncated = false;  // rank < raw.cols()
};

/// Thin QR of U. When U is numerically rank deficient the basis is rebuilt
/// from a column-pivoted QR and truncated to the numerical rank.
SubspaceBasis orthonormalize(const DenseMatrix& u_raw, int iteration,
                             double rank_tol = kDefaultRankTol);

}  // namespace cifeast
