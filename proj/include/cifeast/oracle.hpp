#pragma once

#include <cstdint>
#include <vector>

#include "cifeast/contour.hpp"
#include "cifeast/matrix.hpp"
#include "cifeast/subspace.hpp"

namespace cifeast {

struct JordanBlock {
  Complex value;
  Index size = 1;
};

/// A regular pencil assembled from its Weierstrass form:
///   T A S = blockdiag(J, I),  T B S = blockdiag(I, N)
/// with J the Jordan blocks and N the nilpotent blocks.
struct SyntheticPencil {
  std::vector<JordanBlock> blocks;
  std::vector<Index> nilpotent;
  DenseMatrix s, t, s_inv, t_inv;
  DenseMatrix a, b;

  Index size() const;
  Index finite_dimension() const;
  /// Finite eigenvalues repeated by block size.
  std::vector<Complex> planted() const;
  /// Sum of block sizes with |lambda - center| < radius.
  Index inside_count(const Circle& circle) const;
  DenseMatrix weierstrass_a() const;  // blockdiag(J, I)
  DenseMatrix weierstrass_b() const;  // blockdiag(I, N)
  /// Column of S that is the eigenvector of block i (its first column).
  std::vector<Complex> eigenvector(Index block) const;
  MatrixPencil pencil() const { return MatrixPencil(a, b); }
};

/// S and T are U1 diag(sigma) U2^* with Haar unitaries and sigma log-spaced on
/// [1, conditioning], so cond2(S) = cond2(T) = conditioning. With
/// identity_transforms S = T = I and the pencil is the canonical form itself.
/// Throws SizeMismatch unless the block sizes add up to n.
SyntheticPencil make_synthetic(const std::vector<JordanBlock>& blocks,
                               const std::vector<Index>& nilpotent, Index n, double conditioning,
                               std::uint64_t seed, bool identity_transforms = false);

/// `inside` simple eigenvalues drawn uniformly from the disk of radius
/// inner * rho and n - inside simple eigenvalues with |lambda - center| uniform
/// in [outer_min, outer_max] * rho at uniform angles. No nilpotent part.
SyntheticPencil make_disk_synthetic(Index n, Index inside, const Circle& circle,
                                    double conditioning, std::uint64_t seed, double inner = 0.8,
                                    double outer_min = 1.3, double outer_max = 3.0);

enum class SpectrumMethod { DenseReduction, KnownSynthetic };
enum class ReductionRoute { None, Standard, BInversion, ReversedPencil };

struct ReferenceSpectrum {
  std::vector<Complex> values;  // infinite eigenvalues carried as inf
  DenseMatrix vectors;          // right eigenvectors, may be empty
  SpectrumMethod method = SpectrumMethod::DenseReduction;
  ReductionRoute route = ReductionRoute::None;
};

inline constexpr Index kDefaultDenseLimit = 2000;

struct ReferenceOptions {
  Index dense_limit = kDefaultDenseLimit;
  bool want_vectors = true;
};

/// Full spectrum through B^{-1} A when B factors with a pivot above the
/// reduction gate, otherwise through A^{-1} B with inverted eigenvalues.
/// Throws DenseLimitExceeded or BothReductionsIllConditioned.
ReferenceSpectrum reference_solve(const MatrixPencil& pencil, ReferenceOptions options = {});

/// The planted spectrum: finite values by multiplicity, then one inf per
/// nilpotent dimension. Vectors are the columns of S.
ReferenceSpectrum known_spectrum(const SyntheticPencil& synthetic);

Index count_inside(const ReferenceSpectrum& spectrum, const Circle& circle);
/// Eigenvalues within a 1e-8 relative band of the circle.
Index count_near_boundary(const ReferenceSpectrum& spectrum, const Circle& circle);

/// |f~(lambda_l')| / |f~(lambda_j)| where lambda_l' is the t-th largest filter
/// magnitude counted with multiplicity. Infinite eigenvalues have |f~| = 0.
/// Throws IndexOutOfRange for t outside [1, n] or j outside [0, n).
double predict_rate(const ReferenceSpectrum& spectrum, const ContourRule& rule, Index t, Index j);

inline constexpr double kMatchRadius = 1e-6;

struct SpectrumMatch {
  Index matched = 0;
  double max_distance = 0.0;     // over matched pairs
  std::vector<Complex> unmatched_left;
  std::vector<Complex> unmatched_right;

  bool complete() const { return unmatched_left.empty() && unmatched_right.empty(); }
};

/// Greedy nearest-neighbour pairing; pairs farther apart than `radius` stay
/// unmatched.
SpectrumMatch match_spectra(const std::vector<Complex>& left, const std::vector<Complex>& right,
                            double radius = kMatchRadius);

}  // namespace cifeast
