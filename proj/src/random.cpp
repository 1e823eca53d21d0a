#include "cifeast/random.hpp"

#include <cmath>

#include "cifeast/dense.hpp"

namespace cifeast {

DenseMatrix gaussian_matrix(Index rows, Index cols, Rng& rng, bool complex_entries) {
  std::normal_distribution<double> normal(0.0, 1.0);
  DenseMatrix m(rows, cols);
  const double s = complex_entries ? std::sqrt(0.5) : 1.0;
  for (auto& z : m.entries()) {
    const double re = normal(rng);
    const double im = complex_entries ? normal(rng) : 0.0;
    z = Complex(s * re, s * im);
  }
  return m;
}

DenseMatrix random_unitary(Index n, Rng& rng) {
  // qr_thin returns a nonnegative diagonal R, which makes Q Haar distributed.
  return qr_thin(gaussian_matrix(n, n, rng, true)).q;
}

}  // namespace cifeast
