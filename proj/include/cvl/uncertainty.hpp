#pragma once

// Variance decomposition sigma^2 = Delta^2 + E^2 of a c-valued quantity, the
// Schroedinger and Kennard-Robertson lower bounds in the eigenbasis of the
// reference observable, the combined KRS relation, joint distributions of two
// c-values, and the epistemic restriction identity.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cvl/cval.hpp"
#include "cvl/statistics.hpp"

namespace cvl {

struct VarianceDecomposition {
  double total = 0.0;     // <O~^2> - <O~>^2 from the statistics layer
  double delta_sq = 0.0;  // Born variance of O^w_R
  double err_sq = 0.0;    // fluctuation of the xi-dependent term
  double masked_weight = 0.0;
  std::uint64_t basis_id = 0;

  double residual() const { return std::abs(total - delta_sq - err_sq); }
};

// Throws NotHermitian for a non-Hermitian op.
VarianceDecomposition decompose_variance(const OperatorMatrix& op, const StateVector& psi,
                                         const OrthonormalBasis& basis, const XiModel& model);
VarianceDecomposition decompose_variance(const CValField& field, const XiModel& model);

enum class BoundKind {
  schrodinger,
  kennard_robertson,
  krs_full,
  position_momentum,
  estimation_tradeoff
};

std::string_view to_string(BoundKind kind);

struct BoundReport {
  BoundKind kind = BoundKind::schrodinger;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // lhs - rhs
  std::uint64_t seed = 0;
  // krs_full: |sigma_A^2 sigma_B^2 - (E_A^2 + Delta_A^2) Delta_B^2| in the
  // eigenbasis of B. estimation_tradeoff: |E_{B_o}^2 - Delta_B^2|.
  double aux_residual = 0.0;
  double masked_weight = 0.0;
};

// With swap_roles the basis is the eigenbasis of A and the roles of A and B
// in the left-hand side are interchanged; the right-hand side is unchanged.
BoundReport schrodinger_bound(const OperatorMatrix& a, const OperatorMatrix& b,
                              const StateVector& psi, const XiModel& model,
                              bool swap_roles = false);
BoundReport kennard_robertson_bound(const OperatorMatrix& a, const OperatorMatrix& b,
                                    const StateVector& psi, const XiModel& model,
                                    bool swap_roles = false);
BoundReport krs_check(const OperatorMatrix& a, const OperatorMatrix& b, const StateVector& psi,
                      const XiModel& model);

// Right-hand sides straight from the operators.
double schrodinger_rhs(const OperatorMatrix& a, const OperatorMatrix& b, const StateVector& psi);
double kennard_robertson_rhs(const OperatorMatrix& a, const OperatorMatrix& b,
                             const StateVector& psi);

struct JointPoint {
  double a = 0.0;
  double b = 0.0;
  double weight = 0.0;
};

struct HistogramBins {
  double a_min = 0.0, a_max = 1.0;
  double b_min = 0.0, b_max = 1.0;
  int a_bins = 10;
  int b_bins = 10;
};

struct JointHistogram {
  std::vector<JointPoint> points;  // merged when both coordinates coincide
  double masked_weight = 0.0;
  std::optional<HistogramBins> binning;
  std::vector<double> counts;      // a_bins * b_bins, row-major in a

  double total_weight() const;
  double mean_a() const;
  double mean_b() const;
  double mixed_moment() const;  // sum w a b
};

// Point masses Pr(n) chi(xi) at (A~(n,xi), B~(n,xi)) over the finite
// support of the model.
JointHistogram joint_distribution(const CValField& a, const CValField& b, const XiModel& model,
                                  std::optional<HistogramBins> binning = std::nullopt);

struct EpistemicReport {
  // |A^w_I(b_n|psi) - (hbar/2) dP_n/dtheta / P_n| per basis index; 0 where masked.
  std::vector<double> residual_plain;       // central difference at theta_step
  std::vector<double> residual_richardson;  // one Richardson refinement
  std::vector<bool> masked;
  double masked_weight = 0.0;
  double theta_step = 0.0;

  double max_plain() const;
  double max_richardson() const;
};

// Basis is the eigenbasis of b; psi_theta = exp(-i a theta / hbar) psi.
EpistemicReport epistemic_restriction_check(const OperatorMatrix& a, const OperatorMatrix& b,
                                            const StateVector& psi, double theta_step,
                                            double hbar = 1.0);

// Searches the eigenbases of A, of B and, when [A, B] = 0, a shared eigenbasis
// for one in which both error terms vanish.
struct CommonBasisWitness {
  bool found = false;
  std::string basis;  // "eigen(A)", "eigen(B)", "shared" or ""
  double err_sq_a = 0.0;
  double err_sq_b = 0.0;
  double kr_rhs = 0.0;
};
CommonBasisWitness common_basis_witness(const OperatorMatrix& a, const OperatorMatrix& b,
                                        const StateVector& psi, const XiModel& model);

// Orthonormal eigenbasis of a pair of commuting Hermitian operators.
// Throws InvalidArgument when they do not commute.
OrthonormalBasis shared_eigenbasis(const OperatorMatrix& a, const OperatorMatrix& b);

}  // namespace cvl
