#pragma once

// Test-only helpers: matrix builders, subspace metrics, spectrum matching.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "cifeast/contour.hpp"
#include "cifeast/matrix.hpp"
#include "cifeast/random.hpp"

namespace cifeast::testing {

inline DenseMatrix random_matrix(Index rows, Index cols, std::uint64_t seed, bool complex = true) {
  Rng rng(seed);
  return gaussian_matrix(rows, cols, rng, complex);
}

inline DenseMatrix random_unitary_columns(Index n, Index k, std::uint64_t seed = 99) {
  Rng rng(seed);
  return random_unitary(n, rng).columns(0, k);
}

inline DenseMatrix random_hermitian(Index n, std::uint64_t seed) {
  const DenseMatrix g = random_matrix(n, n, seed);
  DenseMatrix h = g + g.adjoint();
  h *= 0.5;
  return h;
}

/// I + G G^* / n, comfortably positive definite.
inline DenseMatrix random_hpd(Index n, std::uint64_t seed) {
  const DenseMatrix g = random_matrix(n, n, seed);
  DenseMatrix b = adjoint_times(g.adjoint(), g.adjoint());  // G G^*
  b *= 1.0 / static_cast<double>(n);
  for (Index i = 0; i < n; ++i) b(i, i) += 1.0;
  return b;
}

/// Greedy nearest matching of two equally sized multisets; returns the largest
/// matched distance, or +inf if the sizes differ.
inline double matched_distance(std::vector<Complex> a, std::vector<Complex> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  std::vector<bool> used(b.size(), false);
  for (const auto& x : a) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(x - b[j]);
      if (d < best) {
        best = d;
        arg = j;
      }
    }
    used[arg] = true;
    worst = std::max(worst, best);
  }
  return worst;
}

inline double orthonormality_error(const DenseMatrix& q) {
  DenseMatrix g = adjoint_times(q, q);
  for (Index i = 0; i < g.rows(); ++i) g(i, i) -= 1.0;
  return frobenius_norm(g);
}

/// sin of the largest principal angle between span(a) and span(b), both
/// with orthonormal columns (Frobenius bound).
inline double subspace_gap(const DenseMatrix& a, const DenseMatrix& b) {
  const DenseMatrix proj = a * adjoint_times(a, b);
  return frobenius_norm(b - proj);
}

/// ||x - Q Q^* x|| / ||x|| for Q with orthonormal columns.
inline double distance_to_span(const DenseMatrix& q, std::span<const Complex> x) {
  DenseMatrix v(x.size(), 1);
  v.set_column(0, x);
  const DenseMatrix r = v - q * adjoint_times(q, v);
  return frobenius_norm(r) / norm2(x);
}

/// Diagonal test spectrum for the rate law on the unit circle (q = 16):
/// `inside` eigenvalues at radius 0.5, a conjugate pair mu, conj(mu) with
/// |f~(mu)| = target, and the rest at radius >= 8 where |f~| < 1e-13.
/// With t = inside + 1 the t-th and (t+1)-th filter values are both `target`.
struct RateSpectrum {
  std::vector<Complex> values;
  Index inside = 0;
  Complex pair;
};

inline RateSpectrum rate_spectrum(Index n, Index inside, double target) {
  const ContourRule rule = build_rule(Circle({0.0, 0.0}, 1.0), 16);
  const double phi = 0.6;
  double lo = 1.05;
  double hi = 10.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (std::abs(filter_eval(rule, std::polar(mid, phi)).value) > target) lo = mid;
    else hi = mid;
  }
  RateSpectrum out;
  out.inside = inside;
  out.pair = std::polar(0.5 * (lo + hi), phi);
  for (Index k = 0; k < inside; ++k)
    out.values.push_back(std::polar(0.5, 2.0 * std::numbers::pi * static_cast<double>(k) /
                                             static_cast<double>(inside) + 0.3));
  out.values.push_back(out.pair);
  out.values.push_back(std::conj(out.pair));
  for (Index k = 0; out.values.size() < n; ++k)
    out.values.push_back(std::polar(8.0 + static_cast<double>(k), 0.7 * static_cast<double>(k)));
  return out;
}

/// Least-squares slope of log10(values) against their index.
inline double log10_slope(const std::vector<double>& values) {
  const double m = static_cast<double>(values.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double x = static_cast<double>(i);
    const double y = std::log10(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace cifeast::testing
