#pragma once

// The real c-valued quantity
//
//   O~(phi_n, xi | psi) = O^w_R(phi_n|psi) + (xi / hbar) O^w_I(phi_n|psi),
//
// the shared random variable xi that drives it, and the joint realizations
// (n, xi) drawn from Pr(phi_n|psi) chi(xi).

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cvl/hilbert.hpp"
#include "cvl/random.hpp"
#include "cvl/weakvalue.hpp"

namespace cvl {

enum class XiKind { binary, uniform, gaussian, custom_discrete };

std::string_view to_string(XiKind kind);
// Accepts "binary", "uniform", "gaussian". Throws InvalidArgument otherwise.
XiKind parse_xi_kind(std::string_view name);

// Raw moments of xi.
struct XiMoments {
  double mean = 0.0;
  double second = 0.0;
  double third = 0.0;
};

// Distribution chi(xi) with mean 0 and second moment (scale * hbar)^2.
// scale = 1 everywhere except the classical-limit scan, which narrows the
// distribution while keeping hbar in the c-value coupling fixed.
class XiModel {
 public:
  // xi = +-hbar with probability 1/2 each.
  static XiModel binary(double hbar = 1.0, std::uint64_t seed = 0);
  // Uniform on [-sqrt(3) hbar, sqrt(3) hbar].
  static XiModel uniform(double hbar = 1.0, std::uint64_t seed = 0);
  static XiModel gaussian(double hbar = 1.0, std::uint64_t seed = 0);
  // Arbitrary finite support. Throws InvalidModel unless the probabilities
  // form a distribution with mean 0 and second moment hbar^2 (within the
  // identity tolerance, relative to hbar^2).
  static XiModel custom_discrete(double hbar, std::vector<double> support,
                                 std::vector<double> probabilities, std::uint64_t seed = 0);
  static XiModel of_kind(XiKind kind, double hbar = 1.0, std::uint64_t seed = 0);

  // Same shape, width multiplied by s (s >= 0; s = 0 is a point mass at 0).
  XiModel scaled(double s) const;
  XiModel with_seed(std::uint64_t seed) const;

  XiKind kind() const { return kind_; }
  double hbar() const { return hbar_; }
  double scale() const { return scale_; }
  std::uint64_t seed() const { return seed_; }

  XiMoments moments() const;
  // E[(xi/hbar)^k] for k = 0..3.
  std::array<double, 4> reduced_moments() const;
  bool third_moment_vanishes() const;

  bool finite_support() const;
  // (xi, probability) pairs. Throws InvalidModel for continuous kinds.
  std::vector<std::pair<double, double>> support() const;

 private:
  XiModel(XiKind kind, double hbar, std::uint64_t seed);

  XiKind kind_;
  double hbar_;
  double scale_ = 1.0;
  std::uint64_t seed_;
  std::vector<double> custom_support_;  // before scaling
  std::vector<double> custom_probs_;
};

// One independent xi stream; substream `stream` of the model's seed.
class XiSampler {
 public:
  explicit XiSampler(const XiModel& model, std::uint64_t stream = 0);
  double operator()();

 private:
  XiModel model_;
  Rng rng_;
  std::discrete_distribution<std::size_t> custom_;
};

// count i.i.d. draws from substream 0 of the model's seed.
std::vector<double> sample_xi(const XiModel& model, std::size_t count);

struct CValField {
  RVector re_part;
  RVector im_part;
  RVector born_weights;
  std::vector<bool> valid;
  double hbar = 1.0;
  double masked_weight = 0.0;
  std::uint64_t basis_id = 0;
  std::uint64_t state_id = 0;
  std::uint64_t op_id = 0;
  bool op_hermitian = false;

  Index size() const { return re_part.size(); }
  bool is_valid(Index n) const { return valid[static_cast<std::size_t>(n)]; }
  // re_part[n] + (xi/hbar) im_part[n]; throws MaskedEntry for invalid n.
  double evaluate(Index n, double xi) const;
  // (xi/hbar) im_part[n]
  double error_term(Index n, double xi) const;
};

CValField build_cval(const OperatorMatrix& op, const StateVector& psi,
                     const OrthonormalBasis& basis, const XiModel& model);

// Inverts the field from its values at +xi and -xi. Throws InvalidArgument
// for xi = 0.
cplx recover_weak_value(const CValField& field, Index n, double xi);

struct JointSample {
  Index n = 0;
  double xi = 0.0;
  double weight = 1.0;
};

struct JointEnumeration {
  std::vector<JointSample> samples;
  double masked_weight = 0.0;
  double total_weight() const;
};

// Exhaustive product-measure enumeration over valid basis indices and the
// model's finite support. Throws InvalidModel for continuous models.
JointEnumeration enumerate_joint(const StateVector& psi, const OrthonormalBasis& basis,
                                 const XiModel& model);
JointEnumeration enumerate_joint(const RVector& born_weights, const std::vector<bool>& valid,
                                 const XiModel& model);

// Monte Carlo draws (weight 1) of n ~ Born (restricted to valid entries) and
// xi ~ chi. Samples are produced in fixed-size chunks with chunk-indexed
// substreams of `seed`, so the result does not depend on `workers`.
std::vector<JointSample> draw_joint(const RVector& born_weights, const std::vector<bool>& valid,
                                    const XiModel& model, std::size_t count,
                                    std::uint64_t seed, unsigned workers = 1);

// Mixed pre-selection: per-n average of the pure-state fields weighted by
// Pr(psi_mu|phi_n). Cross-checked against weak_value_mixed; disagreement
// throws NumericalDisagreement. Entries with Tr{Pi_n rho} below the squared
// overlap cutoff are masked.
CValField cval_mixed(const OperatorMatrix& op, const MixedEnsemble& ensemble,
                     const OrthonormalBasis& basis, const XiModel& model);

// The per-component pure-state fields of the ensemble, in order.
std::vector<CValField> component_fields(const OperatorMatrix& op, const MixedEnsemble& ensemble,
                                        const OrthonormalBasis& basis, const XiModel& model);

}  // namespace cvl
