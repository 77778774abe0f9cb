#include "cvl/weakvalue.hpp"

#include <cmath>
#include <string>

namespace cvl {

namespace {

void require_dims(const OperatorMatrix& op, Index d, const char* what) {
  if (op.dim() != d) {
    throw DimensionMismatch(std::string(what) + ": operator dimension " +
                            std::to_string(op.dim()) + " vs " + std::to_string(d));
  }
}

cplx checked_overlap(const StateVector& phi, const StateVector& psi) {
  const cplx overlap = phi.inner(psi);
  if (std::abs(overlap) < kOverlapCutoff) {
    throw VanishingOverlap("|<phi|psi>| = " + std::to_string(std::abs(overlap)) +
                           " below cutoff");
  }
  return overlap;
}

WeakValueParts parts_from_projector(const CMatrix& op, const CMatrix& projector,
                                    const StateVector& psi, double prob) {
  const cplx anti = expectation(anticommutator(projector, op), psi);
  const cplx comm = expectation(commutator(projector, op), psi);
  const cplx two_i{0.0, 2.0};
  // Both brackets are real/imaginary by construction; keep the exact parts.
  return {(anti / (2.0 * prob)).real(), (comm / (two_i * prob)).real()};
}

}  // namespace

cplx weak_value(const OperatorMatrix& op, const StateVector& psi, const StateVector& phi) {
  require_dims(op, psi.dim(), "weak_value");
  const cplx overlap = checked_overlap(phi, psi);
  const cplx numerator = phi.amplitudes().dot(op.matrix() * psi.amplitudes());
  return numerator / overlap;
}

WeakValueParts weak_value_parts(const OperatorMatrix& op, const StateVector& psi,
                                const StateVector& phi) {
  require_dims(op, psi.dim(), "weak_value_parts");
  const cplx overlap = checked_overlap(phi, psi);
  const CMatrix projector = phi.amplitudes() * phi.amplitudes().adjoint();
  return parts_from_projector(op.matrix(), projector, psi, std::norm(overlap));
}

cplx weak_value_mixed(const OperatorMatrix& op, const OperatorMatrix& rho,
                      const StateVector& phi) {
  require_dims(op, phi.dim(), "weak_value_mixed");
  require_dims(rho, phi.dim(), "weak_value_mixed");
  if (!rho.hermitian() && !rho.is_numerically_hermitian()) {
    throw NotHermitian("density matrix must be Hermitian");
  }
  const CVector& v = phi.amplitudes();
  // Tr{|phi><phi| X} = <phi|X|phi>
  const cplx denom = v.dot(rho.matrix() * v);
  if (denom.real() < kOverlapCutoff * kOverlapCutoff) {
    throw VanishingOverlap("Tr{Pi_phi rho} below cutoff");
  }
  const cplx numer = v.dot(op.matrix() * (rho.matrix() * v));
  return numer / denom.real();
}

cplx WeakValueField::born_weighted_mean() const {
  cplx sum = 0.0;
  for (Index n = 0; n < size(); ++n) {
    if (valid[static_cast<std::size_t>(n)]) {
      sum += values[n] * born_weights[n];
    }
  }
  return sum;
}

WeakValueField weak_value_field(const OperatorMatrix& op, const StateVector& psi,
                                const OrthonormalBasis& basis) {
  require_dims(op, psi.dim(), "weak_value_field");
  if (basis.dim() != psi.dim()) {
    throw DimensionMismatch("weak_value_field: basis dimension mismatch");
  }
  const Index d = basis.size();
  WeakValueField field;
  field.values = CVector::Zero(d);
  field.real_parts = RVector::Zero(d);
  field.imag_parts = RVector::Zero(d);
  field.born_weights = RVector::Zero(d);
  field.valid.assign(static_cast<std::size_t>(d), false);
  field.basis_id = basis.id();
  field.state_id = psi.id();
  field.op_id = op.id();
  field.op_hermitian = op.hermitian() || op.is_numerically_hermitian();

  const CVector overlaps = basis.columns().adjoint() * psi.amplitudes();
  const CVector numerators = basis.columns().adjoint() * (op.matrix() * psi.amplitudes());
  const double op_scale = op.matrix().cwiseAbs().maxCoeff();

  for (Index n = 0; n < d; ++n) {
    const double amp = std::abs(overlaps[n]);
    const double prob = amp * amp;
    field.born_weights[n] = prob;
    if (amp < kOverlapCutoff) {
      field.masked_weight += prob;
      continue;
    }
    field.valid[static_cast<std::size_t>(n)] = true;
    const cplx w = numerators[n] / overlaps[n];
    field.values[n] = w;
    const WeakValueParts parts =
        parts_from_projector(op.matrix(), basis.projector(n), psi, prob);
    field.real_parts[n] = parts.real;
    field.imag_parts[n] = parts.imag;

    const double allowed = tol::kIdentity * (1.0 + std::abs(w) + op_scale) / std::min(1.0, amp);
    const double gap = std::abs(w - cplx(parts.real, parts.imag));
    if (!(gap <= allowed)) {
      throw NumericalDisagreement("weak value routes disagree at n = " + std::to_string(n) +
                                  ": |quotient - bracket| = " + std::to_string(gap));
    }
  }
  return field;
}

}  // namespace cvl
