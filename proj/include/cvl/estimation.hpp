#pragma once

// Estimating A from the outcome b_n of a projective measurement of B. The
// c-value A~(b_n, xi) = A^w_R + (xi/hbar) A^w_I splits into the optimal
// estimate A^w_R and the single-shot error (xi/hbar) A^w_I.

#include <cstdint>
#include <vector>

#include "cvl/cval.hpp"
#include "cvl/uncertainty.hpp"

namespace cvl {

// One estimate per basis index of the reference eigenbasis.
struct EstimatorField {
  RVector estimates;
  std::vector<bool> valid;
  std::uint64_t basis_id = 0;
  std::uint64_t state_id = 0;

  Index size() const { return estimates.size(); }
};

struct EstimationReport {
  double ms_error = 0.0;         // <(A~ - T)^2> by direct integration
  double ms_decomposed = 0.0;    // <(T - A^w_R)^2> + <((xi/hbar) A^w_I)^2>
  double estimator_term = 0.0;   // <(T - A^w_R)^2>
  double error_term = 0.0;       // <((xi/hbar) A^w_I)^2>
  double bias = 0.0;             // <A~ - T>
  double masked_weight = 0.0;
  bool optimal = false;          // ms_error - error_term <= tolerance
};

// The reference problem: A, psi and the eigenbasis of B.
struct EstimationProblem {
  OperatorMatrix a;
  StateVector psi;
  OperatorMatrix b;
  OrthonormalBasis basis;  // eigenbasis of b
  RVector b_values;        // eigenvalues aligned with basis

  // Throws NotHermitian unless both operators are Hermitian.
  EstimationProblem(OperatorMatrix a, StateVector psi, OperatorMatrix b);
};

// T(b_n) = A^w_R(b_n|psi).
EstimatorField optimal_estimator(const EstimationProblem& problem, const XiModel& model);
EstimatorField constant_estimator(const EstimationProblem& problem, double value);

// (xi/hbar) A^w_I(b_n|psi) = A~(b_n, xi) - A^w_R(b_n|psi)
double single_shot_error(const CValField& field_a, Index n, double xi);

EstimationReport ms_error(const EstimatorField& estimator, const EstimationProblem& problem,
                          const XiModel& model);

// sum_n Pr(n) (A~(b_n, xi) - T(b_n)) at a fixed xi.
double conditional_bias(const EstimatorField& estimator, const CValField& field_a, double xi);

// lhs = E^2_A E^2_{B_o} with B_o = <B^w_R> the constant estimate of B in its
// own eigenbasis; aux_residual = |E^2_{B_o} - Delta^2_B|.
BoundReport self_estimation_tradeoff(const OperatorMatrix& a, const OperatorMatrix& b,
                                     const StateVector& psi, const XiModel& model);

struct ScanRow {
  double scale = 0.0;
  double ms_error = 0.0;
};

// ms_error of the optimal estimator with the xi width multiplied by each
// scale in turn.
std::vector<ScanRow> classical_limit_scan(const EstimationProblem& problem,
                                          const XiModel& model,
                                          const std::vector<double>& scales);

}  // namespace cvl
