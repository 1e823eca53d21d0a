#include "cifeast/contour.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

#include "cifeast/error.hpp"
#include "cifeast/format.hpp"

namespace cifeast {

Circle::Circle(Complex c, double r) : center(c), radius(r) {
  if (!(r > 0.0) || !std::isfinite(r) || !std::isfinite(c.real()) || !std::isfinite(c.imag()))
    fail(ErrorKind::InvalidArgument, "circle needs a finite center and a positive radius");
}

GaussLegendre gauss_legendre(int q) {
  if (q < 1 || q > kMaxQuadratureNodes)
    fail(ErrorKind::InvalidArgument,
         "Gauss-Legendre order must lie in [1, 512], got " + std::to_string(q));
  GaussLegendre rule;
  rule.nodes.assign(static_cast<std::size_t>(q), 0.0);
  rule.weights.assign(static_cast<std::size_t>(q), 0.0);
  const double qd = q;

  // P_q and its derivative by the three-term recurrence.
  auto legendre = [q, qd](double x, double& dp) {
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= q; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = qd * (x * p1 - p0) / (x * x - 1.0);
    return p1;
  };

  const int half = (q + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // i-th largest root.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (qd + 0.5));
    double dp = 0.0;
    if (q % 2 == 1 && i == half - 1) {
      x = 0.0;
    } else {
      for (int it = 0; it < 100; ++it) {
        const double p = legendre(x, dp);
        const double dx = p / dp;
        x -= dx;
        if (std::abs(dx) <= 1e-15) break;
      }
    }
    legendre(x, dp);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto hi = static_cast<std::size_t>(q - 1 - i);
    const auto lo = static_cast<std::size_t>(i);
    rule.nodes[hi] = x;
    rule.nodes[lo] = -x;
    rule.weights[hi] = w;
    rule.weights[lo] = w;
  }
  return rule;
}

ContourRule build_rule(const Circle& circle, int q) {
  if (q < 2) fail(ErrorKind::InvalidArgument, "contour rule needs at least 2 nodes");
  const GaussLegendre gl = gauss_legendre(q);
  ContourRule rule;
  rule.circle = circle;
  rule.gauss_nodes = gl.nodes;
  rule.gauss_weights = gl.weights;
  rule.points.resize(static_cast<std::size_t>(q));
  rule.weights.resize(static_cast<std::size_t>(q));
  rule.offsets.resize(static_cast<std::size_t>(q));

  const double rho = circle.radius;
  for (int j = 0; j < (q + 1) / 2; ++j) {
    const auto lo = static_cast<std::size_t>(j);
    const auto hi = static_cast<std::size_t>(q - 1 - j);
    Complex e;
    if (lo == hi) {
      e = Complex(-1.0, 0.0);  // t = 0 maps to theta = pi
    } else {
      const double theta = (1.0 + gl.nodes[lo]) * std::numbers::pi;
      e = Complex(std::cos(theta), std::sin(theta));
    }
    rule.offsets[lo] = rho * e;
    rule.offsets[hi] = rho * std::conj(e);
    rule.points[lo] = circle.center + rho * e;
    rule.weights[lo] = 0.5 * gl.weights[lo] * rho * e;
    rule.points[hi] = circle.center + rho * std::conj(e);
    rule.weights[hi] = 0.5 * gl.weights[hi] * rho * std::conj(e);
  }
  return rule;
}

FilterEvaluation filter_eval(const ContourRule& rule, Complex mu) {
  const double guard = 1e-14 * rule.circle.radius;
  const Complex shift = mu - rule.circle.center;
  Complex sum(0.0, 0.0);
  for (std::size_t j = 0; j < rule.points.size(); ++j) {
    const Complex d = rule.offsets[j] - shift;
    if (std::abs(d) < guard) fail(ErrorKind::PoleCollision, "filter evaluated at a quadrature node");
    sum += rule.weights[j] / d;
  }
  return {mu, sum};
}

FilterGrid filter_grid(const ContourRule& rule, const std::vector<double>& r_samples,
                       const std::vector<double>& theta_samples) {
  FilterGrid grid;
  grid.r_samples = r_samples;
  grid.theta_samples = theta_samples;
  grid.abs_values.reserve(r_samples.size() * theta_samples.size());
  grid.pole_flags.reserve(r_samples.size() * theta_samples.size());
  for (const double r : r_samples) {
    if (!(r >= 0.0)) fail(ErrorKind::InvalidArgument, "filter grid radii must be nonnegative");
    for (const double theta : theta_samples) {
      const Complex mu =
          rule.circle.center + r * rule.circle.radius * Complex(std::cos(theta), std::sin(theta));
      try {
        grid.abs_values.push_back(std::abs(filter_eval(rule, mu).value));
        grid.pole_flags.push_back(false);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::PoleCollision) throw;
        grid.abs_values.push_back(std::numeric_limits<double>::infinity());
        grid.pole_flags.push_back(true);
      }
    }
  }
  return grid;
}

void write_filter_csv(std::ostream& os, const FilterGrid& grid) {
  os << "r,theta,abs_f,log10_abs_f\n";
  for (std::size_t ir = 0; ir < grid.r_samples.size(); ++ir) {
    for (std::size_t it = 0; it < grid.theta_samples.size(); ++it) {
      const double v = grid.at(ir, it);
      const bool pole = grid.pole(ir, it);
      os << format_double(grid.r_samples[ir]) << ',' << format_double(grid.theta_samples[it])
         << ',' << (pole ? "inf" : format_double(v)) << ','
         << (pole ? "inf" : format_double(std::log10(v))) << '\n';
    }
  }
}

}  // namespace cifeast
