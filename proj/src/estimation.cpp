#include "cvl/estimation.hpp"

#include <cmath>

namespace cvl {

namespace {

Eigensystem checked_eigensystem(const OperatorMatrix& a, const OperatorMatrix& b) {
  if ((!a.hermitian() && !a.is_numerically_hermitian()) ||
      (!b.hermitian() && !b.is_numerically_hermitian())) {
    throw NotHermitian("estimation needs Hermitian operators");
  }
  if (a.dim() != b.dim()) throw DimensionMismatch("estimation: operator dimension mismatch");
  return eigenbasis(b);
}

void check_estimator(const EstimatorField& t, const CValField& f) {
  if (t.size() != f.size() || t.basis_id != f.basis_id || t.state_id != f.state_id) {
    throw ProvenanceMismatch("estimator and c-value field come from different contexts");
  }
}

}  // namespace

EstimationProblem::EstimationProblem(OperatorMatrix a_in, StateVector psi_in, OperatorMatrix b_in)
    : a(std::move(a_in)),
      psi(std::move(psi_in)),
      b(std::move(b_in)),
      basis(OrthonormalBasis::computational(b.dim())) {
  Eigensystem es = checked_eigensystem(a, b);
  if (psi.dim() != a.dim()) throw DimensionMismatch("estimation: state dimension mismatch");
  basis = std::move(es.basis);
  b_values = std::move(es.eigenvalues);
}

EstimatorField optimal_estimator(const EstimationProblem& problem, const XiModel& model) {
  const CValField f = build_cval(problem.a, problem.psi, problem.basis, model);
  return {f.re_part, f.valid, f.basis_id, f.state_id};
}

EstimatorField constant_estimator(const EstimationProblem& problem, double value) {
  const RVector born = born_probabilities(problem.basis, problem.psi);
  std::vector<bool> valid(static_cast<std::size_t>(born.size()));
  for (Index n = 0; n < born.size(); ++n) {
    valid[static_cast<std::size_t>(n)] = std::sqrt(born[n]) >= kOverlapCutoff;
  }
  return {RVector::Constant(born.size(), value), valid, problem.basis.id(), problem.psi.id()};
}

double single_shot_error(const CValField& field_a, Index n, double xi) {
  return field_a.error_term(n, xi);
}

EstimationReport ms_error(const EstimatorField& estimator, const EstimationProblem& problem,
                          const XiModel& model) {
  const CValField f = build_cval(problem.a, problem.psi, problem.basis, model);
  check_estimator(estimator, f);
  const auto m = model.reduced_moments();
  EstimationReport r;
  r.masked_weight = f.masked_weight;

  for (Index n = 0; n < f.size(); ++n) {
    if (!f.is_valid(n)) continue;
    const double p = f.born_weights[n];
    const double gap = estimator.estimates[n] - f.re_part[n];
    r.estimator_term += p * gap * gap;
    r.error_term += p * m[2] * f.im_part[n] * f.im_part[n];
  }
  r.ms_decomposed = r.estimator_term + r.error_term;

  if (model.finite_support()) {
    const JointEnumeration joint = enumerate_joint(f.born_weights, f.valid, model);
    for (const auto& s : joint.samples) {
      const double e = f.evaluate(s.n, s.xi) - estimator.estimates[s.n];
      r.ms_error += s.weight * e * e;
      r.bias += s.weight * e;
    }
  } else {
    // (R - T + t I)^2 integrated against the moments of t.
    for (Index n = 0; n < f.size(); ++n) {
      if (!f.is_valid(n)) continue;
      const double p = f.born_weights[n];
      const double u = f.re_part[n] - estimator.estimates[n];
      const double i = f.im_part[n];
      r.ms_error += p * (u * u + 2.0 * m[1] * u * i + m[2] * i * i);
      r.bias += p * (u + m[1] * i);
    }
  }
  r.optimal = r.ms_error - r.error_term <= tol::kIdentity;
  return r;
}

double conditional_bias(const EstimatorField& estimator, const CValField& field_a, double xi) {
  check_estimator(estimator, field_a);
  double sum = 0.0;
  for (Index n = 0; n < field_a.size(); ++n) {
    if (!field_a.is_valid(n)) continue;
    sum += field_a.born_weights[n] * (field_a.evaluate(n, xi) - estimator.estimates[n]);
  }
  return sum;
}

BoundReport self_estimation_tradeoff(const OperatorMatrix& a, const OperatorMatrix& b,
                                     const StateVector& psi, const XiModel& model) {
  const EstimationProblem for_a(a, psi, b);
  const EstimationProblem for_b(b, psi, b);
  const EstimationReport ea = ms_error(optimal_estimator(for_a, model), for_a, model);

  // B_o: the best constant estimate of B, its Born mean in its own eigenbasis.
  double b_o = 0.0;
  const RVector born = born_probabilities(for_b.basis, psi);
  for (Index n = 0; n < born.size(); ++n) b_o += born[n] * for_b.b_values[n];
  const EstimationReport eb = ms_error(constant_estimator(for_b, b_o), for_b, model);

  const double delta_b = decompose_variance(b, psi, for_b.basis, model).delta_sq;
  BoundReport r;
  r.kind = BoundKind::estimation_tradeoff;
  r.lhs = ea.ms_error * eb.ms_error;
  r.rhs = kennard_robertson_rhs(a, b, psi);
  r.slack = r.lhs - r.rhs;
  r.aux_residual = std::abs(eb.ms_error - delta_b);
  r.masked_weight = ea.masked_weight;
  return r;
}

std::vector<ScanRow> classical_limit_scan(const EstimationProblem& problem,
                                          const XiModel& model,
                                          const std::vector<double>& scales) {
  const EstimatorField t = optimal_estimator(problem, model);
  std::vector<ScanRow> rows;
  rows.reserve(scales.size());
  for (double s : scales) {
    const XiModel narrowed = model.scaled(s);
    rows.push_back({s, ms_error(t, problem, narrowed).ms_error});
  }
  return rows;
}

}  // namespace cvl
