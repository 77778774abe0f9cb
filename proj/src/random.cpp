#include "cvl/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cvl {

std::uint64_t mix_seed(std::uint64_t root, std::uint64_t stream) {
  std::uint64_t z = root + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t mix_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b) {
  return mix_seed(mix_seed(root, a), b);
}

namespace {

CMatrix ginibre(Rng& rng, Index rows, Index cols) {
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(2.0));
  CMatrix g(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = cplx(re, im);
    }
  }
  return g;
}

}  // namespace

StateVector haar_state(Rng& rng, Index dim) {
  return StateVector::normalized(ginibre(rng, dim, 1).col(0));
}

CMatrix haar_unitary(Rng& rng, Index dim) {
  const CMatrix g = ginibre(rng, dim, dim);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ() * CMatrix::Identity(dim, dim);
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < dim; ++j) {
    const cplx diag = r(j, j);
    const double mag = std::abs(diag);
    if (mag > 0.0) {
      q.col(j) *= diag / mag;
    }
  }
  return q;
}

OrthonormalBasis haar_basis(Rng& rng, Index dim) {
  return OrthonormalBasis(haar_unitary(rng, dim));
}

OperatorMatrix random_hermitian(Rng& rng, Index dim, double scale) {
  const CMatrix g = ginibre(rng, dim, dim) * (scale / std::sqrt(static_cast<double>(dim)));
  return OperatorMatrix::hermitian_part(g);
}

OperatorMatrix random_operator(Rng& rng, Index dim, double scale) {
  return OperatorMatrix(ginibre(rng, dim, dim) * (scale / std::sqrt(static_cast<double>(dim))));
}

double min_overlap(const StateVector& psi, std::span<const OrthonormalBasis* const> bases) {
  double smallest = std::numeric_limits<double>::infinity();
  for (const OrthonormalBasis* basis : bases) {
    const CVector overlaps = basis->columns().adjoint() * psi.amplitudes();
    smallest = std::min(smallest, overlaps.cwiseAbs().minCoeff());
  }
  return smallest;
}

StateVector haar_state_with_min_overlap(Rng& rng, Index dim,
                                        std::span<const OrthonormalBasis* const> bases,
                                        double threshold, int max_tries) {
  for (int attempt = 0; attempt < max_tries; ++attempt) {
    StateVector psi = haar_state(rng, dim);
    if (min_overlap(psi, bases) >= threshold) {
      return psi;
    }
  }
  throw InvalidArgument("rejection sampling found no state with the requested minimum overlap");
}

}  // namespace cvl
