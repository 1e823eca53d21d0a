#pragma once

#include <cstdint>
#include <random>

#include "cifeast/matrix.hpp"

namespace cifeast {

using Rng = std::mt19937_64;

/// i.i.d. standard normal entries; real unless `complex_entries` is set, in
/// which case real and imaginary parts are independent N(0, 1/2).
DenseMatrix gaussian_matrix(Index rows, Index cols, Rng& rng, bool complex_entries = false);

/// Haar-distributed unitary matrix (QR of a complex Gaussian, phases fixed).
DenseMatrix random_unitary(Index n, Rng& rng);

}  // namespace cifeast
