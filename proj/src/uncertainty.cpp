#include "cvl/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace cvl {

std::string_view to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::schrodinger:
      return "schrodinger";
    case BoundKind::kennard_robertson:
      return "kennard_robertson";
    case BoundKind::krs_full:
      return "krs_full";
    case BoundKind::position_momentum:
      return "position_momentum";
    case BoundKind::estimation_tradeoff:
      return "estimation_tradeoff";
  }
  return "unknown";
}

VarianceDecomposition decompose_variance(const CValField& field, const XiModel& model) {
  if (!field.op_hermitian) throw NotHermitian("variance decomposition needs a Hermitian operator");
  const auto m = model.reduced_moments();
  double mean_r = 0.0, mean_r2 = 0.0, mean_i = 0.0, mean_i2 = 0.0, mean_ri = 0.0;
  for (Index n = 0; n < field.size(); ++n) {
    if (!field.is_valid(n)) continue;
    const double p = field.born_weights[n];
    const double r = field.re_part[n];
    const double i = field.im_part[n];
    mean_r += p * r;
    mean_r2 += p * r * r;
    mean_i += p * i;
    mean_i2 += p * i * i;
    mean_ri += p * r * i;
  }
  VarianceDecomposition out;
  out.delta_sq = mean_r2 - mean_r * mean_r;
  out.err_sq = m[2] * mean_i2 - (m[1] * mean_i) * (m[1] * mean_i);
  // Full second moment of O~ = R + t I, including the cross term in E[t].
  const double second = mean_r2 + 2.0 * m[1] * mean_ri + m[2] * mean_i2;
  const double first = mean_r + m[1] * mean_i;
  out.total = second - first * first;
  out.masked_weight = field.masked_weight;
  out.basis_id = field.basis_id;
  return out;
}

VarianceDecomposition decompose_variance(const OperatorMatrix& op, const StateVector& psi,
                                         const OrthonormalBasis& basis, const XiModel& model) {
  if (!op.hermitian() && !op.is_numerically_hermitian()) {
    throw NotHermitian("variance decomposition needs a Hermitian operator");
  }
  return decompose_variance(build_cval(op, psi, basis, model), model);
}

double schrodinger_rhs(const OperatorMatrix& a, const OperatorMatrix& b, const StateVector& psi) {
  const double anti = 0.5 * expectation(anticommutator(a, b), psi).real();
  const double ea = expectation(a, psi).real();
  const double eb = expectation(b, psi).real();
  const double cov = anti - ea * eb;
  return cov * cov;
}

double kennard_robertson_rhs(const OperatorMatrix& a, const OperatorMatrix& b,
                             const StateVector& psi) {
  return 0.25 * std::norm(expectation(commutator(a, b), psi));
}

namespace {

void require_hermitian_pair(const OperatorMatrix& a, const OperatorMatrix& b) {
  if ((!a.hermitian() && !a.is_numerically_hermitian()) ||
      (!b.hermitian() && !b.is_numerically_hermitian())) {
    throw NotHermitian("uncertainty bounds need Hermitian operators");
  }
  if (a.dim() != b.dim()) throw DimensionMismatch("operator pair dimension mismatch");
}

// Decompositions of the "estimated" operator x and the "reference" operator
// y in the eigenbasis of y.
struct PairInBasis {
  VarianceDecomposition x;
  VarianceDecomposition y;
};

PairInBasis decompose_pair(const OperatorMatrix& x, const OperatorMatrix& y,
                           const StateVector& psi, const XiModel& model) {
  const Eigensystem es = eigenbasis(y);
  return {decompose_variance(x, psi, es.basis, model),
          decompose_variance(y, psi, es.basis, model)};
}

BoundReport finish(BoundKind kind, double lhs, double rhs, double masked) {
  BoundReport r;
  r.kind = kind;
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = lhs - rhs;
  r.masked_weight = masked;
  return r;
}

}  // namespace

BoundReport schrodinger_bound(const OperatorMatrix& a, const OperatorMatrix& b,
                              const StateVector& psi, const XiModel& model, bool swap_roles) {
  require_hermitian_pair(a, b);
  const PairInBasis p = swap_roles ? decompose_pair(b, a, psi, model)
                                   : decompose_pair(a, b, psi, model);
  return finish(BoundKind::schrodinger, p.x.delta_sq * p.y.delta_sq, schrodinger_rhs(a, b, psi),
                p.x.masked_weight);
}

BoundReport kennard_robertson_bound(const OperatorMatrix& a, const OperatorMatrix& b,
                                    const StateVector& psi, const XiModel& model,
                                    bool swap_roles) {
  require_hermitian_pair(a, b);
  const PairInBasis p = swap_roles ? decompose_pair(b, a, psi, model)
                                   : decompose_pair(a, b, psi, model);
  return finish(BoundKind::kennard_robertson, p.x.err_sq * p.y.delta_sq,
                kennard_robertson_rhs(a, b, psi), p.x.masked_weight);
}

BoundReport krs_check(const OperatorMatrix& a, const OperatorMatrix& b, const StateVector& psi,
                      const XiModel& model) {
  require_hermitian_pair(a, b);
  const PairInBasis p = decompose_pair(a, b, psi, model);
  const double lhs = p.x.total * p.y.total;
  BoundReport r = finish(BoundKind::krs_full, lhs,
                         kennard_robertson_rhs(a, b, psi) + schrodinger_rhs(a, b, psi),
                         p.x.masked_weight);
  const double split = p.x.err_sq * p.y.delta_sq + p.x.delta_sq * p.y.delta_sq;
  r.aux_residual = std::abs(lhs - split);
  return r;
}

// ---------------------------------------------------------------------------

double JointHistogram::total_weight() const {
  double s = 0.0;
  for (const auto& p : points) s += p.weight;
  return s;
}

double JointHistogram::mean_a() const {
  double s = 0.0;
  for (const auto& p : points) s += p.weight * p.a;
  return s;
}

double JointHistogram::mean_b() const {
  double s = 0.0;
  for (const auto& p : points) s += p.weight * p.b;
  return s;
}

double JointHistogram::mixed_moment() const {
  double s = 0.0;
  for (const auto& p : points) s += p.weight * p.a * p.b;
  return s;
}

JointHistogram joint_distribution(const CValField& a, const CValField& b, const XiModel& model,
                                  std::optional<HistogramBins> binning) {
  if (a.size() != b.size() || a.state_id != b.state_id || a.basis_id != b.basis_id) {
    throw ProvenanceMismatch("joint distribution of fields from different (state, basis) pairs");
  }
  const JointEnumeration joint = enumerate_joint(a.born_weights, a.valid, model);
  std::map<std::pair<double, double>, double> merged;
  for (const auto& s : joint.samples) {
    merged[{a.evaluate(s.n, s.xi), b.evaluate(s.n, s.xi)}] += s.weight;
  }
  JointHistogram h;
  h.masked_weight = joint.masked_weight;
  h.points.reserve(merged.size());
  for (const auto& [ab, w] : merged) h.points.push_back({ab.first, ab.second, w});
  if (binning) {
    const HistogramBins& bins = *binning;
    if (bins.a_bins < 1 || bins.b_bins < 1 || !(bins.a_max > bins.a_min) ||
        !(bins.b_max > bins.b_min)) {
      throw InvalidArgument("histogram bins need positive counts and nonempty ranges");
    }
    h.binning = bins;
    h.counts.assign(static_cast<std::size_t>(bins.a_bins * bins.b_bins), 0.0);
    for (const auto& p : h.points) {
      const double fa = (p.a - bins.a_min) / (bins.a_max - bins.a_min);
      const double fb = (p.b - bins.b_min) / (bins.b_max - bins.b_min);
      if (fa < 0.0 || fa > 1.0 || fb < 0.0 || fb > 1.0) continue;
      const int ia = std::min(bins.a_bins - 1, static_cast<int>(fa * bins.a_bins));
      const int ib = std::min(bins.b_bins - 1, static_cast<int>(fb * bins.b_bins));
      h.counts[static_cast<std::size_t>(ia * bins.b_bins + ib)] += p.weight;
    }
  }
  return h;
}

// ---------------------------------------------------------------------------

double EpistemicReport::max_plain() const {
  return residual_plain.empty() ? 0.0
                                : *std::max_element(residual_plain.begin(), residual_plain.end());
}

double EpistemicReport::max_richardson() const {
  return residual_richardson.empty()
             ? 0.0
             : *std::max_element(residual_richardson.begin(), residual_richardson.end());
}

EpistemicReport epistemic_restriction_check(const OperatorMatrix& a, const OperatorMatrix& b,
                                            const StateVector& psi, double theta_step,
                                            double hbar) {
  require_hermitian_pair(a, b);
  if (!(theta_step > 0.0)) throw InvalidArgument("theta_step must be positive");
  if (!(hbar > 0.0)) throw InvalidArgument("hbar must be positive");
  const Eigensystem es = eigenbasis(b);
  const WeakValueField wv = weak_value_field(a, psi, es.basis);
  const UnitaryFlow flow(a, hbar);

  auto probs = [&](double theta) { return born_probabilities(es.basis, flow.apply(psi, theta)); };
  const double h = theta_step;
  const RVector p_plus = probs(h), p_minus = probs(-h);
  const RVector q_plus = probs(0.5 * h), q_minus = probs(-0.5 * h);

  const std::size_t d = static_cast<std::size_t>(es.basis.size());
  EpistemicReport r;
  r.theta_step = h;
  r.masked_weight = wv.masked_weight;
  r.residual_plain.assign(d, 0.0);
  r.residual_richardson.assign(d, 0.0);
  r.masked.assign(d, false);
  for (std::size_t n = 0; n < d; ++n) {
    const Index k = static_cast<Index>(n);
    if (!wv.valid[n]) {
      r.masked[n] = true;
      continue;
    }
    const double p0 = wv.born_weights[k];
    const double d_h = (p_plus[k] - p_minus[k]) / (2.0 * h);
    const double d_half = (q_plus[k] - q_minus[k]) / h;
    const double d_rich = (4.0 * d_half - d_h) / 3.0;
    const double target = wv.imag_parts[k];
    r.residual_plain[n] = std::abs(target - 0.5 * hbar * d_h / p0);
    r.residual_richardson[n] = std::abs(target - 0.5 * hbar * d_rich / p0);
  }
  return r;
}

// ---------------------------------------------------------------------------

OrthonormalBasis shared_eigenbasis(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_hermitian_pair(a, b);
  const CMatrix& ma = a.matrix();
  const CMatrix& mb = b.matrix();
  const double scale = std::max({1.0, ma.cwiseAbs().maxCoeff(), mb.cwiseAbs().maxCoeff()});
  if ((ma * mb - mb * ma).cwiseAbs().maxCoeff() > tol::kEig * scale * scale) {
    throw InvalidArgument("operators do not commute; no shared eigenbasis");
  }
  // A generic combination separates the joint eigenspaces.
  for (double c : {0.5772156649015329, 1.4142135623730951, 2.718281828459045, 0.3183098861837907}) {
    const Eigensystem es = eigenbasis(OperatorMatrix(CMatrix(ma + c * mb), true));
    const CMatrix& v = es.basis.columns();
    const CMatrix da = v.adjoint() * ma * v;
    const CMatrix db = v.adjoint() * mb * v;
    const double off_a = (da - CMatrix(da.diagonal().asDiagonal())).cwiseAbs().maxCoeff();
    const double off_b = (db - CMatrix(db.diagonal().asDiagonal())).cwiseAbs().maxCoeff();
    if (off_a <= 1e-8 * scale && off_b <= 1e-8 * scale) return es.basis;
  }
  throw NumericalDisagreement("could not find a shared eigenbasis");
}

CommonBasisWitness common_basis_witness(const OperatorMatrix& a, const OperatorMatrix& b,
                                        const StateVector& psi, const XiModel& model) {
  require_hermitian_pair(a, b);
  CommonBasisWitness w;
  w.kr_rhs = kennard_robertson_rhs(a, b, psi);
  auto try_basis = [&](const OrthonormalBasis& basis, const char* name) {
    const double ea = decompose_variance(a, psi, basis, model).err_sq;
    const double eb = decompose_variance(b, psi, basis, model).err_sq;
    if (ea + eb < w.err_sq_a + w.err_sq_b) {
      w.err_sq_a = ea;
      w.err_sq_b = eb;
      w.basis = name;
    }
    if (ea <= 1e-12 && eb <= 1e-12) w.found = true;
    return w.found;
  };
  w.err_sq_a = w.err_sq_b = std::numeric_limits<double>::infinity();
  if (try_basis(eigenbasis(a).basis, "eigen(A)")) return w;
  if (try_basis(eigenbasis(b).basis, "eigen(B)")) return w;
  try {
    try_basis(shared_eigenbasis(a, b), "shared");
  } catch (const InvalidArgument&) {
  }
  if (!w.found) w.basis.clear();
  return w;
}

}  // namespace cvl
