#pragma once

#include <iosfwd>
#include <vector>

#include "cifeast/matrix.hpp"

namespace cifeast {

/// Circle in the complex plane; the only contour shape supported.
struct Circle {
  Complex center;
  double radius = 1.0;

  Circle() = default;
  /// Throws InvalidArgument unless radius > 0 and everything is finite.
  Circle(Complex center, double radius);

  bool contains(Complex z) const { return std::abs(z - center) < radius; }
};

struct GaussLegendre {
  std::vector<double> nodes;    // strictly increasing in (-1, 1)
  std::vector<double> weights;  // positive, sum to 2
};

inline constexpr int kMaxQuadratureNodes = 512;

/// q-point Gauss-Legendre rule on [-1, 1], 1 <= q <= 512. Nodes are Newton
/// refined roots of P_q started from Chebyshev-like guesses; the rule is
/// exactly symmetric (nodes[q-1-j] == -nodes[j]).
GaussLegendre gauss_legendre(int q);

/// Quadrature on the circle: z_j = center + radius * exp(i theta_j) with
/// theta_j = (1 + t_j) pi, and effective weights w_j = omega_j (z_j - center)/2
/// so that sum_j w_j / (z_j - mu) approximates the indicator of the disk.
struct ContourRule {
  Circle circle;
  std::vector<double> gauss_nodes;
  std::vector<double> gauss_weights;
  std::vector<Complex> points;
  std::vector<Complex> weights;
  std::vector<Complex> offsets;  // z_j - center, kept to avoid cancellation

  int size() const noexcept { return static_cast<int>(points.size()); }
};

/// Mirrored nodes are stored as exact reflections across the line through
/// the center parallel to the real axis: points[q-1-j] - c == conj(points[j] - c).
ContourRule build_rule(const Circle& circle, int q);

struct FilterEvaluation {
  Complex point;
  Complex value;
};

/// f~(mu) = sum_j w_j / (z_j - mu). Throws PoleCollision when mu is within
/// 1e-14 * radius of a node.
FilterEvaluation filter_eval(const ContourRule& rule, Complex mu);

/// |f~| sampled on mu = center + r * radius * exp(i theta).
struct FilterGrid {
  std::vector<double> r_samples;
  std::vector<double> theta_samples;
  std::vector<double> abs_values;  // row per r, column per theta (r-major)
  std::vector<bool> pole_flags;    // same layout; true where mu hit a node

  double at(std::size_t ir, std::size_t it) const {
    return abs_values[ir * theta_samples.size() + it];
  }
  bool pole(std::size_t ir, std::size_t it) const {
    return pole_flags[ir * theta_samples.size() + it];
  }
};

FilterGrid filter_grid(const ContourRule& rule, const std::vector<double>& r_samples,
                       const std::vector<double>& theta_samples);

/// CSV with header `r,theta,abs_f,log10_abs_f`, r-major. Pole cells carry
/// `inf` in both value columns.
void write_filter_csv(std::ostream& os, const FilterGrid& grid);

}  // namespace cifeast
