#pragma once

#include <vector>

#include "cifeast/matrix.hpp"

// Self-contained dense kernels: LU with partial pivoting, thin Householder QR,
// Hessenberg + shifted QR eigensolver and the small generalized eigensolver
// used for projected problems. Everything is complex double precision.

namespace cifeast {

struct LuFactorization {
  DenseMatrix lu;             // unit-lower L below the diagonal, U on and above
  std::vector<Index> perm;    // row i of P*M is row perm[i] of M
  double min_pivot = 0.0;     // smallest |U(k,k)| encountered
  double input_norm = 0.0;    // ||M||_F, for relative singularity tests

  Index size() const noexcept { return lu.rows(); }
};

/// Throws ExactSingular if a pivot column is exactly zero.
LuFactorization lu_factor(DenseMatrix m);

/// Solves M X = rhs for every column of rhs.
DenseMatrix lu_solve(const LuFactorization& fac, const DenseMatrix& rhs);

/// Same, but for the conjugate matrix conj(M): X = conj(M^{-1} conj(rhs)).
DenseMatrix lu_solve_conjugate(const LuFactorization& fac, const DenseMatrix& rhs);

/// Reassembles P^T L U, mainly for tests.
DenseMatrix lu_reconstruct(const LuFactorization& fac);

inline constexpr double kDefaultRankTol = 1e-12;

struct QrFactorization {
  DenseMatrix q;               // n x k, orthonormal columns
  DenseMatrix r;               // k x k upper triangular, real diagonal >= 0
  std::vector<Index> perm;     // column permutation (identity unless pivoted)
  Index rank = 0;              // diagonal entries above rank_tol * max |R(i,i)|
  double rank_tol = kDefaultRankTol;
};

/// Thin Householder QR of an n x k matrix (n >= k), no pivoting, so that
/// q * r reproduces the input column by column.
QrFactorization qr_thin(const DenseMatrix& m, double rank_tol = kDefaultRankTol);

/// Householder QR with column pivoting: q * r = m(:, perm). Numerically
/// dependent columns are pushed to the end, so the first `rank` columns of q
/// span the numerical range.
QrFactorization qr_pivoted(const DenseMatrix& m, double rank_tol = kDefaultRankTol);

enum class Conditioning { WellConditioned, IllConditioned };

struct SmallEigResult {
  std::vector<Complex> values;   // may contain infinities for singular B
  DenseMatrix vectors;           // column i pairs with values[i], unit 2-norm
  Conditioning conditioning = Conditioning::WellConditioned;
};

struct EigOptions {
  bool want_vectors = true;
};

/// All eigenvalues of a square matrix: Householder reduction to Hessenberg
/// form followed by single-shift complex QR iteration. Eigenvectors come from
/// back substitution on the Schur form. Throws NoConvergence after 30*k sweeps.
SmallEigResult eig_dense(const DenseMatrix& m, EigOptions options = {});

/// Threshold for the B-inversion route: smallest LU pivot must exceed this
/// fraction of ||B||_F.
inline constexpr double kReductionPivotGate = 1e-10;

/// Eigenpairs of A y = lambda B y for small dense pairs.
///
/// If B factors with a comfortable pivot the pencil is reduced to B^{-1} A.
/// Otherwise the pair is flagged ill-conditioned and solved through a shifted
/// inverse (A - mu B)^{-1} B with a fixed complex shift mu; eigenvalues of B's
/// null space come back as infinity. Throws SingularPencilProjection when no
/// shift gives a usable factorization.
SmallEigResult eig_generalized(const DenseMatrix& a, const DenseMatrix& b,
                               EigOptions options = {});

}  // namespace cifeast
