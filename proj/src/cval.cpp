#include "cvl/cval.hpp"

#include <cmath>
#include <numeric>

#include "cvl/parallel.hpp"

namespace cvl {

std::string_view to_string(XiKind kind) {
  switch (kind) {
    case XiKind::binary:
      return "binary";
    case XiKind::uniform:
      return "uniform";
    case XiKind::gaussian:
      return "gaussian";
    case XiKind::custom_discrete:
      return "custom_discrete";
  }
  return "unknown";
}

XiKind parse_xi_kind(std::string_view name) {
  if (name == "binary") return XiKind::binary;
  if (name == "uniform") return XiKind::uniform;
  if (name == "gaussian") return XiKind::gaussian;
  throw InvalidArgument("unknown xi kind '" + std::string(name) +
                        "' (expected binary, uniform or gaussian)");
}

// ---------------------------------------------------------------------------
// XiModel

XiModel::XiModel(XiKind kind, double hbar, std::uint64_t seed)
    : kind_(kind), hbar_(hbar), seed_(seed) {
  if (!(hbar > 0.0) || !std::isfinite(hbar)) {
    throw InvalidModel("xi model needs hbar > 0");
  }
}

XiModel XiModel::binary(double hbar, std::uint64_t seed) {
  return XiModel(XiKind::binary, hbar, seed);
}

XiModel XiModel::uniform(double hbar, std::uint64_t seed) {
  return XiModel(XiKind::uniform, hbar, seed);
}

XiModel XiModel::gaussian(double hbar, std::uint64_t seed) {
  return XiModel(XiKind::gaussian, hbar, seed);
}

XiModel XiModel::of_kind(XiKind kind, double hbar, std::uint64_t seed) {
  switch (kind) {
    case XiKind::binary:
      return binary(hbar, seed);
    case XiKind::uniform:
      return uniform(hbar, seed);
    case XiKind::gaussian:
      return gaussian(hbar, seed);
    case XiKind::custom_discrete:
      break;
  }
  throw InvalidModel("custom_discrete models need an explicit support");
}

XiModel XiModel::custom_discrete(double hbar, std::vector<double> support,
                                 std::vector<double> probabilities, std::uint64_t seed) {
  XiModel model(XiKind::custom_discrete, hbar, seed);
  if (support.empty() || support.size() != probabilities.size()) {
    throw InvalidModel("custom xi model needs one probability per support point");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (!(probabilities[i] >= 0.0) || !std::isfinite(support[i])) {
      throw InvalidModel("custom xi model has a negative probability or non-finite point");
    }
    total += probabilities[i];
  }
  if (std::abs(total - 1.0) > tol::kIdentity) {
    throw InvalidModel("custom xi probabilities must sum to 1");
  }
  model.custom_support_ = std::move(support);
  model.custom_probs_ = std::move(probabilities);
  const XiMoments m = model.moments();
  const double h2 = hbar * hbar;
  if (std::abs(m.mean) > tol::kIdentity * hbar || std::abs(m.second - h2) > tol::kIdentity * h2) {
    throw InvalidModel("custom xi model must have mean 0 and variance hbar^2");
  }
  return model;
}

XiModel XiModel::scaled(double s) const {
  if (!(s >= 0.0) || !std::isfinite(s)) {
    throw InvalidModel("xi scale must be finite and nonnegative");
  }
  XiModel copy = *this;
  copy.scale_ = scale_ * s;
  return copy;
}

XiModel XiModel::with_seed(std::uint64_t seed) const {
  XiModel copy = *this;
  copy.seed_ = seed;
  return copy;
}

XiMoments XiModel::moments() const {
  const double w = scale_ * hbar_;
  if (kind_ != XiKind::custom_discrete) {
    return {0.0, w * w, 0.0};
  }
  XiMoments m;
  for (std::size_t i = 0; i < custom_support_.size(); ++i) {
    const double x = scale_ * custom_support_[i];
    const double p = custom_probs_[i];
    m.mean += p * x;
    m.second += p * x * x;
    m.third += p * x * x * x;
  }
  return m;
}

std::array<double, 4> XiModel::reduced_moments() const {
  const XiMoments m = moments();
  return {1.0, m.mean / hbar_, m.second / (hbar_ * hbar_), m.third / (hbar_ * hbar_ * hbar_)};
}

bool XiModel::third_moment_vanishes() const {
  const double w = hbar_ * std::max(scale_, 1e-300);
  return std::abs(moments().third) <= tol::kIdentity * w * w * w;
}

bool XiModel::finite_support() const {
  return kind_ == XiKind::binary || kind_ == XiKind::custom_discrete || scale_ == 0.0;
}

std::vector<std::pair<double, double>> XiModel::support() const {
  if (scale_ == 0.0) {
    return {{0.0, 1.0}};
  }
  if (kind_ == XiKind::binary) {
    const double w = scale_ * hbar_;
    return {{-w, 0.5}, {w, 0.5}};
  }
  if (kind_ == XiKind::custom_discrete) {
    std::vector<std::pair<double, double>> out;
    out.reserve(custom_support_.size());
    for (std::size_t i = 0; i < custom_support_.size(); ++i) {
      out.emplace_back(scale_ * custom_support_[i], custom_probs_[i]);
    }
    return out;
  }
  throw InvalidModel("xi model '" + std::string(to_string(kind_)) +
                     "' has continuous support and cannot be enumerated");
}

// ---------------------------------------------------------------------------
// Sampling

XiSampler::XiSampler(const XiModel& model, std::uint64_t stream)
    : model_(model), rng_(mix_seed(model.seed(), stream)) {
  if (model_.kind() == XiKind::custom_discrete) {
    const auto pts = model_.support();
    std::vector<double> probs;
    probs.reserve(pts.size());
    for (const auto& [x, p] : pts) probs.push_back(p);
    custom_ = std::discrete_distribution<std::size_t>(probs.begin(), probs.end());
  }
}

double XiSampler::operator()() {
  const double w = model_.scale() * model_.hbar();
  if (w == 0.0) {
    return 0.0;
  }
  switch (model_.kind()) {
    case XiKind::binary:
      return (rng_() >> 63) != 0 ? w : -w;
    case XiKind::uniform: {
      std::uniform_real_distribution<double> u(-std::sqrt(3.0) * w, std::sqrt(3.0) * w);
      return u(rng_);
    }
    case XiKind::gaussian: {
      std::normal_distribution<double> g(0.0, w);
      return g(rng_);
    }
    case XiKind::custom_discrete:
      return model_.support()[custom_(rng_)].first;
  }
  throw InvalidModel("unknown xi kind");
}

std::vector<double> sample_xi(const XiModel& model, std::size_t count) {
  if (count < 1) {
    throw InvalidArgument("sample_xi needs count >= 1");
  }
  XiSampler sampler(model, 0);
  std::vector<double> out(count);
  for (auto& x : out) x = sampler();
  return out;
}

// ---------------------------------------------------------------------------
// CValField

double CValField::evaluate(Index n, double xi) const {
  if (n < 0 || n >= size()) {
    throw InvalidArgument("basis index out of range");
  }
  if (!is_valid(n)) {
    throw MaskedEntry("c-value requested at a masked basis index");
  }
  return re_part[n] + (xi / hbar) * im_part[n];
}

double CValField::error_term(Index n, double xi) const {
  if (n < 0 || n >= size()) {
    throw InvalidArgument("basis index out of range");
  }
  if (!is_valid(n)) {
    throw MaskedEntry("error term requested at a masked basis index");
  }
  return (xi / hbar) * im_part[n];
}

CValField build_cval(const OperatorMatrix& op, const StateVector& psi,
                     const OrthonormalBasis& basis, const XiModel& model) {
  const WeakValueField wv = weak_value_field(op, psi, basis);
  CValField field;
  field.re_part = wv.real_parts;
  field.im_part = wv.imag_parts;
  field.born_weights = wv.born_weights;
  field.valid = wv.valid;
  field.hbar = model.hbar();
  field.masked_weight = wv.masked_weight;
  field.basis_id = wv.basis_id;
  field.state_id = wv.state_id;
  field.op_id = wv.op_id;
  field.op_hermitian = wv.op_hermitian;
  return field;
}

cplx recover_weak_value(const CValField& field, Index n, double xi) {
  if (xi == 0.0) {
    throw InvalidArgument("weak value recovery needs xi != 0");
  }
  const double up = field.evaluate(n, xi);
  const double down = field.evaluate(n, -xi);
  return {0.5 * (up + down), field.hbar / (2.0 * xi) * (up - down)};
}

// ---------------------------------------------------------------------------
// Joint distribution

double JointEnumeration::total_weight() const {
  double total = 0.0;
  for (const auto& s : samples) total += s.weight;
  return total;
}

JointEnumeration enumerate_joint(const RVector& born_weights, const std::vector<bool>& valid,
                                 const XiModel& model) {
  const auto points = model.support();
  JointEnumeration out;
  for (Index n = 0; n < born_weights.size(); ++n) {
    const double p = born_weights[n];
    if (!valid[static_cast<std::size_t>(n)]) {
      out.masked_weight += p;
      continue;
    }
    for (const auto& [xi, q] : points) {
      if (p * q > 0.0) out.samples.push_back({n, xi, p * q});
    }
  }
  return out;
}

JointEnumeration enumerate_joint(const StateVector& psi, const OrthonormalBasis& basis,
                                 const XiModel& model) {
  const RVector born = born_probabilities(basis, psi);
  std::vector<bool> valid(static_cast<std::size_t>(born.size()));
  for (Index n = 0; n < born.size(); ++n) {
    valid[static_cast<std::size_t>(n)] = std::sqrt(born[n]) >= kOverlapCutoff;
  }
  return enumerate_joint(born, valid, model);
}

std::vector<JointSample> draw_joint(const RVector& born_weights, const std::vector<bool>& valid,
                                    const XiModel& model, std::size_t count,
                                    std::uint64_t seed, unsigned workers) {
  constexpr std::size_t kChunk = 4096;
  std::vector<double> probs(static_cast<std::size_t>(born_weights.size()));
  for (Index n = 0; n < born_weights.size(); ++n) {
    probs[static_cast<std::size_t>(n)] = valid[static_cast<std::size_t>(n)] ? born_weights[n] : 0.0;
  }
  if (std::accumulate(probs.begin(), probs.end(), 0.0) <= 0.0) {
    throw InvalidArgument("no unmasked Born weight to sample from");
  }
  std::vector<JointSample> out(count);
  const std::size_t chunks = (count + kChunk - 1) / kChunk;
  parallel_for(chunks, workers, [&](std::size_t c) {
    Rng rng(mix_seed(seed, 2 * c));
    XiSampler xi_sampler(model.with_seed(seed), 2 * c + 1);
    std::discrete_distribution<Index> born(probs.begin(), probs.end());
    const std::size_t stop = std::min(count, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < stop; ++i) {
      out[i].n = born(rng);
      out[i].xi = xi_sampler();
      out[i].weight = 1.0;
    }
  });
  return out;
}

// ---------------------------------------------------------------------------
// Mixed pre-selection

std::vector<CValField> component_fields(const OperatorMatrix& op, const MixedEnsemble& ensemble,
                                        const OrthonormalBasis& basis, const XiModel& model) {
  std::vector<CValField> out;
  out.reserve(ensemble.size());
  for (const auto& state : ensemble.states()) {
    out.push_back(build_cval(op, state, basis, model));
  }
  return out;
}

CValField cval_mixed(const OperatorMatrix& op, const MixedEnsemble& ensemble,
                     const OrthonormalBasis& basis, const XiModel& model) {
  if (op.dim() != ensemble.dim() || basis.dim() != ensemble.dim()) {
    throw DimensionMismatch("cval_mixed: dimension mismatch");
  }
  const Index d = basis.size();
  const OperatorMatrix rho = density_matrix(ensemble);
  const std::vector<CValField> parts = component_fields(op, ensemble, basis, model);

  CValField field;
  field.re_part = RVector::Zero(d);
  field.im_part = RVector::Zero(d);
  field.born_weights = RVector::Zero(d);
  field.valid.assign(static_cast<std::size_t>(d), false);
  field.hbar = model.hbar();
  field.basis_id = basis.id();
  field.state_id = rho.id();
  field.op_id = op.id();
  field.op_hermitian = op.hermitian() || op.is_numerically_hermitian();

  const double cutoff = kOverlapCutoff * kOverlapCutoff;
  for (Index n = 0; n < d; ++n) {
    double denom = 0.0;
    for (std::size_t mu = 0; mu < ensemble.size(); ++mu) {
      denom += ensemble.weights()[mu] * parts[mu].born_weights[n];
    }
    field.born_weights[n] = denom;
    if (denom < cutoff) {
      field.masked_weight += denom;
      continue;
    }
    field.valid[static_cast<std::size_t>(n)] = true;
    double re = 0.0;
    double im = 0.0;
    const StateVector phi = basis.vector(n);
    for (std::size_t mu = 0; mu < ensemble.size(); ++mu) {
      const double joint = ensemble.weights()[mu] * parts[mu].born_weights[n];
      if (joint == 0.0) continue;
      if (parts[mu].is_valid(n)) {
        re += joint * parts[mu].re_part[n];
        im += joint * parts[mu].im_part[n];
      } else {
        // Pr * O^w stays finite as the overlap vanishes: conj(<phi|psi>) <phi|O|psi>.
        const StateVector& psi = ensemble.states()[mu];
        const cplx prod = std::conj(phi.inner(psi)) * phi.amplitudes().dot(op.matrix() * psi.amplitudes());
        re += ensemble.weights()[mu] * prod.real();
        im += ensemble.weights()[mu] * prod.imag();
      }
    }
    field.re_part[n] = re / denom;
    field.im_part[n] = im / denom;

    const cplx direct = weak_value_mixed(op, rho, phi);
    const double allowed =
        tol::kIdentity * (1.0 + std::abs(direct) + op.matrix().cwiseAbs().maxCoeff()) /
        std::min(1.0, std::sqrt(denom));
    if (!(std::abs(direct - cplx(field.re_part[n], field.im_part[n])) <= allowed)) {
      throw NumericalDisagreement("mixed-state c-value disagrees with Tr{Pi O rho}/Tr{Pi rho}");
    }
  }
  return field;
}

}  // namespace cvl
