#pragma once

// Complex weak values O^w(phi|psi) = <phi|O|psi> / <phi|psi>, for a single
// post-selection, vectorized over a complete basis, and for mixed
// pre-selections.

#include <cstdint>
#include <vector>

#include "cvl/hilbert.hpp"

namespace cvl {

// Amplitude-scale cutoff on |<phi|psi>|; probabilities below its square are
// treated as vanishing.
inline constexpr double kOverlapCutoff = 1e-8;

struct WeakValueParts {
  double real = 0.0;
  double imag = 0.0;
};

// Throws VanishingOverlap when |<phi|psi>| < kOverlapCutoff.
cplx weak_value(const OperatorMatrix& op, const StateVector& psi, const StateVector& phi);

// Real part from <psi|{Pi_phi, O}|psi> / (2|<phi|psi>|^2) and imaginary part
// from <psi|[Pi_phi, O]|psi> / (2i|<phi|psi>|^2), using the bracket
// conventions of hilbert.hpp. Independent of the quotient route.
WeakValueParts weak_value_parts(const OperatorMatrix& op, const StateVector& psi,
                                const StateVector& phi);

// Tr{Pi_phi O rho} / Tr{Pi_phi rho}. Throws VanishingOverlap when
// Tr{Pi_phi rho} < kOverlapCutoff^2 and NotHermitian for a non-Hermitian rho.
cplx weak_value_mixed(const OperatorMatrix& op, const OperatorMatrix& rho,
                      const StateVector& phi);

struct WeakValueField {
  CVector values;           // quotient route, one per basis index
  RVector real_parts;       // anticommutator route
  RVector imag_parts;       // commutator route
  RVector born_weights;     // |<phi_n|psi>|^2
  std::vector<bool> valid;  // false where |<phi_n|psi>| < kOverlapCutoff
  double masked_weight = 0.0;  // total Born weight of invalid entries
  std::uint64_t basis_id = 0;
  std::uint64_t state_id = 0;
  std::uint64_t op_id = 0;
  bool op_hermitian = false;

  Index size() const { return values.size(); }
  // Born-weighted sum over valid entries; equals <psi|O|psi> up to the
  // masked weight.
  cplx born_weighted_mean() const;
};

// Computes both routes for every basis index; a disagreement larger than
// the identity tolerance (scaled by the conditioning 1/|<phi_n|psi>|) throws
// NumericalDisagreement.
WeakValueField weak_value_field(const OperatorMatrix& op, const StateVector& psi,
                                const OrthonormalBasis& basis);

}  // namespace cvl
