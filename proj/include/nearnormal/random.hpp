#pragma once

#include <cstdint>
#include <random>

#include "nearnormal/linalg.hpp"

namespace nearnormal {

/// All randomness in the library flows through this engine, seeded explicitly.
using Rng = std::mt19937_64;

/// Entries with independent standard normal real and imaginary parts.
CMatrix complex_gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng);

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the phases
/// of R's diagonal folded into Q.
CMatrix haar_unitary(Eigen::Index n, Rng& rng);

/// Uniform sample from the open unit disc.
Complex uniform_in_disc(Rng& rng);

} // namespace nearnormal
