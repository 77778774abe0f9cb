#pragma once

// Seeded generators for random test instances: Haar states and bases,
// Hermitian and general operators, and deterministic seed derivation.

#include <cstdint>
#include <random>
#include <span>

#include "cvl/hilbert.hpp"

namespace cvl {

using Rng = std::mt19937_64;

// splitmix64 finalizer; derives independent substream seeds from a root seed.
std::uint64_t mix_seed(std::uint64_t root, std::uint64_t stream);
std::uint64_t mix_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b);

// Normalized vector of i.i.d. standard complex gaussians.
StateVector haar_state(Rng& rng, Index dim);

// QR of a complex Ginibre matrix with the R-diagonal phases divided out.
CMatrix haar_unitary(Rng& rng, Index dim);
OrthonormalBasis haar_basis(Rng& rng, Index dim);

// (G + G^dagger)/2 with G complex Ginibre scaled by `scale / sqrt(dim)`.
OperatorMatrix random_hermitian(Rng& rng, Index dim, double scale = 1.0);

// Complex Ginibre matrix scaled by `scale / sqrt(dim)`; not Hermitian.
OperatorMatrix random_operator(Rng& rng, Index dim, double scale = 1.0);

// Smallest |<phi_n|psi>| over every vector of every given basis.
double min_overlap(const StateVector& psi, std::span<const OrthonormalBasis* const> bases);

// Haar state rejection-sampled until min_overlap >= threshold. Throws
// InvalidArgument after max_tries failed draws.
StateVector haar_state_with_min_overlap(Rng& rng, Index dim,
                                        std::span<const OrthonormalBasis* const> bases,
                                        double threshold = 1e-3, int max_tries = 10000);

}  // namespace cvl
