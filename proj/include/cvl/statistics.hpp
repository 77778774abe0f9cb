#pragma once

// Ensemble averages over the joint distribution Pr(phi_n|psi) chi(xi) of
// c-valued quantities. Three evaluation routes share one integrand:
//   exact       closed form in the reduced moments E[(xi/hbar)^k], k <= 3
//   enumerated  sum over the finite support of the xi model
//   monte_carlo draws from draw_joint, reported with a standard error

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cvl/cval.hpp"

namespace cvl {

enum class AverageMethod { exact, enumerated, monte_carlo };

std::string_view to_string(AverageMethod method);

struct EnsembleAverage {
  cplx value{0.0, 0.0};
  AverageMethod method = AverageMethod::exact;
  std::optional<double> mc_stderr;  // present iff method == monte_carlo
  double masked_weight = 0.0;
  std::size_t samples = 0;          // MC draws or enumerated points

  double real() const { return value.real(); }
};

struct AverageOptions {
  AverageMethod method = AverageMethod::exact;
  std::size_t samples = 100000;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

// <O~>  ->  Re<psi|O|psi>
EnsembleAverage mean_cval(const CValField& field, const StateVector& psi,
                          const OrthonormalBasis& basis, const XiModel& model,
                          const AverageOptions& options = {});

// <(xi/hbar) O~>  ->  Im<psi|O|psi>
EnsembleAverage xi_weighted_mean(const CValField& field, const StateVector& psi,
                                 const OrthonormalBasis& basis, const XiModel& model,
                                 const AverageOptions& options = {});

// mean_cval + i xi_weighted_mean  ->  <psi|O|psi>
EnsembleAverage complex_expectation(const CValField& field, const StateVector& psi,
                                    const OrthonormalBasis& basis, const XiModel& model,
                                    const AverageOptions& options = {});

// <A~ B~>  ->  <psi|(A^dagger B + B^dagger A)/2|psi>
EnsembleAverage product_average(const CValField& a, const CValField& b, const StateVector& psi,
                                const OrthonormalBasis& basis, const XiModel& model,
                                const AverageOptions& options = {});

// <(xi/hbar) A~(n,-xi) B~(n,xi)>  ->  (1/2i)<psi|A^dagger B - B^dagger A|psi>.
// Throws InvalidModel unless the third moment of xi vanishes.
EnsembleAverage commutator_average(const CValField& a, const CValField& b,
                                   const StateVector& psi, const OrthonormalBasis& basis,
                                   const XiModel& model, const AverageOptions& options = {});

// product_average + i commutator_average  ->  <psi|A^dagger B|psi>
EnsembleAverage full_product_representation(const CValField& a, const CValField& b,
                                            const StateVector& psi,
                                            const OrthonormalBasis& basis, const XiModel& model,
                                            const AverageOptions& options = {});

// sum_n conj(A^w) B^w Pr(n) over valid entries, straight from the weak values.
cplx weak_value_correlation(const WeakValueField& a, const WeakValueField& b);

// <A~ B~> - <A~><B~>; both fields must come from Hermitian operators.
EnsembleAverage covariance(const CValField& a, const CValField& b, const StateVector& psi,
                           const OrthonormalBasis& basis, const XiModel& model,
                           const AverageOptions& options = {});
EnsembleAverage variance(const CValField& field, const StateVector& psi,
                         const OrthonormalBasis& basis, const XiModel& model,
                         const AverageOptions& options = {});

// <(A~ - B~)^2>  ->  <psi|(A - B)^2|psi>; Hermitian operators only.
EnsembleAverage statistical_deviation(const CValField& a, const CValField& b,
                                      const StateVector& psi, const OrthonormalBasis& basis,
                                      const XiModel& model, const AverageOptions& options = {});

// <A~ B~ + f(c_n)> in the eigenbasis of C, f(c) = sum_k coeffs[k] c^k.
struct EquivalenceResult {
  EnsembleAverage average;
  cplx oracle;  // <psi|(A^dagger B + B^dagger A)/2 + f(C)|psi>
};
EquivalenceResult equivalence_theorem(const OperatorMatrix& a, const OperatorMatrix& b,
                                      const std::vector<double>& poly, const OperatorMatrix& c,
                                      const StateVector& psi, const XiModel& model,
                                      const AverageOptions& options = {});

// Product of local c-values a (x) 1 and 1 (x) b evaluated once with one
// global xi and once with independent xi_A, xi_B.
struct SeparableXiReport {
  EnsembleAverage global;     // one shared xi
  EnsembleAverage separable;  // independent xi_A, xi_B
  double cross_term = 0.0;    // sum_n A^w_I B^w_I Pr(n)
  double residual = 0.0;      // |global - separable - cross_term|
};
SeparableXiReport separable_xi_product(const OperatorMatrix& a_local,
                                       const OperatorMatrix& b_local, const StateVector& psi,
                                       const OrthonormalBasis& basis_a,
                                       const OrthonormalBasis& basis_b, const XiModel& model_a,
                                       const XiModel& model_b, const AverageOptions& options = {});

// sum_mu Pr(psi_mu) <A~ B~>_mu  ->  Tr{rho (A^dagger B + B^dagger A)/2}
EnsembleAverage mixed_product_average(const MixedEnsemble& ensemble, const OperatorMatrix& a,
                                      const OperatorMatrix& b, const OrthonormalBasis& basis,
                                      const XiModel& model, const AverageOptions& options = {});

// Throws ProvenanceMismatch unless the field was built from psi and basis.
void check_provenance(const CValField& field, const StateVector& psi,
                      const OrthonormalBasis& basis);

struct VerificationRecord {
  std::string operation;
  std::vector<std::uint64_t> input_ids;  // operator, state and basis hashes
  AverageMethod method = AverageMethod::exact;
  cplx value;
  cplx oracle;
  double abs_error = 0.0;
  double masked_weight = 0.0;
  std::optional<double> mc_stderr;
};

VerificationRecord make_record(std::string operation, std::vector<std::uint64_t> input_ids,
                               const EnsembleAverage& average, cplx oracle);

}  // namespace cvl
