#include "cvl/statistics.hpp"

#include <array>
#include <cmath>
#include <functional>

namespace cvl {

std::string_view to_string(AverageMethod method) {
  switch (method) {
    case AverageMethod::exact:
      return "exact";
    case AverageMethod::enumerated:
      return "enumerated";
    case AverageMethod::monte_carlo:
      return "monte_carlo";
  }
  return "unknown";
}

namespace {

using Coeffs = std::array<cplx, 4>;

// f(n, xi) = sum_k coeffs(n)[k] (xi/hbar)^k; point(n, xi) evaluates f
// directly from the fields and is used by the sampled routes.
struct Integrand {
  std::function<Coeffs(Index)> coeffs;
  std::function<cplx(Index, double)> point;
};

struct Support {
  const RVector& born;
  const std::vector<bool>& valid;
  double masked_weight;
};

EnsembleAverage integrate(const Support& s, const XiModel& model, const AverageOptions& opt,
                          const Integrand& f) {
  EnsembleAverage out;
  out.method = opt.method;
  out.masked_weight = s.masked_weight;
  switch (opt.method) {
    case AverageMethod::exact: {
      const auto m = model.reduced_moments();
      for (Index n = 0; n < s.born.size(); ++n) {
        if (!s.valid[static_cast<std::size_t>(n)]) continue;
        const Coeffs c = f.coeffs(n);
        const cplx inner = c[0] * m[0] + c[1] * m[1] + c[2] * m[2] + c[3] * m[3];
        out.value += s.born[n] * inner;
      }
      out.samples = static_cast<std::size_t>(s.born.size());
      break;
    }
    case AverageMethod::enumerated: {
      const JointEnumeration joint = enumerate_joint(s.born, s.valid, model);
      for (const auto& js : joint.samples) out.value += js.weight * f.point(js.n, js.xi);
      out.samples = joint.samples.size();
      break;
    }
    case AverageMethod::monte_carlo: {
      if (opt.samples < 2) throw InvalidArgument("monte carlo needs at least 2 samples");
      const auto draws = draw_joint(s.born, s.valid, model, opt.samples, opt.seed, opt.workers);
      double valid_mass = 0.0;
      for (Index n = 0; n < s.born.size(); ++n) {
        if (s.valid[static_cast<std::size_t>(n)]) valid_mass += s.born[n];
      }
      cplx sum = 0.0;
      double sum_sq = 0.0;
      std::vector<cplx> values(draws.size());
      for (std::size_t i = 0; i < draws.size(); ++i) {
        values[i] = f.point(draws[i].n, draws[i].xi);
        sum += values[i];
      }
      const double count = static_cast<double>(draws.size());
      const cplx mean = sum / count;
      for (const cplx& v : values) sum_sq += std::norm(v - mean);
      const double sample_var = sum_sq / (count - 1.0);
      out.value = valid_mass * mean;
      out.mc_stderr = valid_mass * std::sqrt(sample_var / count);
      out.samples = draws.size();
      break;
    }
  }
  return out;
}

Support support_of(const CValField& f) { return {f.born_weights, f.valid, f.masked_weight}; }

void check_pair(const CValField& a, const CValField& b) {
  if (a.size() != b.size() || a.state_id != b.state_id || a.basis_id != b.basis_id) {
    throw ProvenanceMismatch("c-value fields come from different (state, basis) pairs");
  }
  if (a.hbar != b.hbar) {
    throw ProvenanceMismatch("c-value fields use different hbar");
  }
}

void check_model(const CValField& f, const XiModel& model) {
  if (f.hbar != model.hbar()) {
    throw ProvenanceMismatch("xi model hbar differs from the field's hbar");
  }
}

void require_hermitian(const CValField& f, const char* what) {
  if (!f.op_hermitian) throw NotHermitian(std::string(what) + " needs Hermitian operators");
}

double t_of(const CValField& f, double xi) { return xi / f.hbar; }

}  // namespace

void check_provenance(const CValField& field, const StateVector& psi,
                      const OrthonormalBasis& basis) {
  if (field.state_id != psi.id() || field.basis_id != basis.id()) {
    throw ProvenanceMismatch("c-value field was not built from this (state, basis) pair");
  }
}

EnsembleAverage mean_cval(const CValField& field, const StateVector& psi,
                          const OrthonormalBasis& basis, const XiModel& model,
                          const AverageOptions& options) {
  check_provenance(field, psi, basis);
  check_model(field, model);
  Integrand f{[&](Index n) -> Coeffs { return {field.re_part[n], field.im_part[n], 0.0, 0.0}; },
              [&](Index n, double xi) -> cplx { return field.evaluate(n, xi); }};
  return integrate(support_of(field), model, options, f);
}

EnsembleAverage xi_weighted_mean(const CValField& field, const StateVector& psi,
                                 const OrthonormalBasis& basis, const XiModel& model,
                                 const AverageOptions& options) {
  check_provenance(field, psi, basis);
  check_model(field, model);
  Integrand f{[&](Index n) -> Coeffs { return {0.0, field.re_part[n], field.im_part[n], 0.0}; },
              [&](Index n, double xi) -> cplx { return t_of(field, xi) * field.evaluate(n, xi); }};
  return integrate(support_of(field), model, options, f);
}

EnsembleAverage complex_expectation(const CValField& field, const StateVector& psi,
                                    const OrthonormalBasis& basis, const XiModel& model,
                                    const AverageOptions& options) {
  check_provenance(field, psi, basis);
  check_model(field, model);
  const cplx i{0.0, 1.0};
  Integrand f{[&](Index n) -> Coeffs {
                const double r = field.re_part[n];
                const double m = field.im_part[n];
                return {r, m + i * r, i * m, 0.0};
              },
              [&](Index n, double xi) -> cplx {
                const double v = field.evaluate(n, xi);
                return v + i * t_of(field, xi) * v;
              }};
  return integrate(support_of(field), model, options, f);
}

EnsembleAverage product_average(const CValField& a, const CValField& b, const StateVector& psi,
                                const OrthonormalBasis& basis, const XiModel& model,
                                const AverageOptions& options) {
  check_pair(a, b);
  check_provenance(a, psi, basis);
  check_model(a, model);
  Integrand f{[&](Index n) -> Coeffs {
                const double ar = a.re_part[n], ai = a.im_part[n];
                const double br = b.re_part[n], bi = b.im_part[n];
                return {ar * br, ar * bi + ai * br, ai * bi, 0.0};
              },
              [&](Index n, double xi) -> cplx { return a.evaluate(n, xi) * b.evaluate(n, xi); }};
  return integrate(support_of(a), model, options, f);
}

EnsembleAverage commutator_average(const CValField& a, const CValField& b,
                                   const StateVector& psi, const OrthonormalBasis& basis,
                                   const XiModel& model, const AverageOptions& options) {
  check_pair(a, b);
  check_provenance(a, psi, basis);
  check_model(a, model);
  if (!model.third_moment_vanishes()) {
    throw InvalidModel("commutator representation needs a vanishing third moment of xi");
  }
  Integrand f{[&](Index n) -> Coeffs {
                const double ar = a.re_part[n], ai = a.im_part[n];
                const double br = b.re_part[n], bi = b.im_part[n];
                return {0.0, ar * br, ar * bi - ai * br, -ai * bi};
              },
              [&](Index n, double xi) -> cplx {
                return t_of(a, xi) * a.evaluate(n, -xi) * b.evaluate(n, xi);
              }};
  return integrate(support_of(a), model, options, f);
}

EnsembleAverage full_product_representation(const CValField& a, const CValField& b,
                                            const StateVector& psi,
                                            const OrthonormalBasis& basis, const XiModel& model,
                                            const AverageOptions& options) {
  check_pair(a, b);
  check_provenance(a, psi, basis);
  check_model(a, model);
  if (!model.third_moment_vanishes()) {
    throw InvalidModel("commutator representation needs a vanishing third moment of xi");
  }
  const cplx i{0.0, 1.0};
  Integrand f{[&](Index n) -> Coeffs {
                const double ar = a.re_part[n], ai = a.im_part[n];
                const double br = b.re_part[n], bi = b.im_part[n];
                return {ar * br, ar * bi + ai * br + i * ar * br,
                        ai * bi + i * (ar * bi - ai * br), -i * ai * bi};
              },
              [&](Index n, double xi) -> cplx {
                const double t = t_of(a, xi);
                return a.evaluate(n, xi) * b.evaluate(n, xi) +
                       i * t * a.evaluate(n, -xi) * b.evaluate(n, xi);
              }};
  return integrate(support_of(a), model, options, f);
}

cplx weak_value_correlation(const WeakValueField& a, const WeakValueField& b) {
  if (a.size() != b.size() || a.state_id != b.state_id || a.basis_id != b.basis_id) {
    throw ProvenanceMismatch("weak value fields come from different (state, basis) pairs");
  }
  cplx sum = 0.0;
  for (Index n = 0; n < a.size(); ++n) {
    if (a.valid[static_cast<std::size_t>(n)]) {
      sum += std::conj(a.values[n]) * b.values[n] * a.born_weights[n];
    }
  }
  return sum;
}

EnsembleAverage covariance(const CValField& a, const CValField& b, const StateVector& psi,
                           const OrthonormalBasis& basis, const XiModel& model,
                           const AverageOptions& options) {
  check_pair(a, b);
  check_provenance(a, psi, basis);
  check_model(a, model);
  require_hermitian(a, "covariance");
  require_hermitian(b, "covariance");
  if (options.method != AverageMethod::monte_carlo) {
    const EnsembleAverage ab = product_average(a, b, psi, basis, model, options);
    const EnsembleAverage ma = mean_cval(a, psi, basis, model, options);
    const EnsembleAverage mb = mean_cval(b, psi, basis, model, options);
    EnsembleAverage out = ab;
    out.value = ab.value - ma.value * mb.value;
    return out;
  }
  // Two passes over one sample set: means, then centered products.
  const Support s = support_of(a);
  const auto draws = draw_joint(s.born, s.valid, model, options.samples, options.seed,
                                options.workers);
  const double count = static_cast<double>(draws.size());
  double mean_a = 0.0;
  double mean_b = 0.0;
  for (const auto& d : draws) {
    mean_a += a.evaluate(d.n, d.xi);
    mean_b += b.evaluate(d.n, d.xi);
  }
  mean_a /= count;
  mean_b /= count;
  std::vector<double> centered(draws.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < draws.size(); ++k) {
    centered[k] = (a.evaluate(draws[k].n, draws[k].xi) - mean_a) *
                  (b.evaluate(draws[k].n, draws[k].xi) - mean_b);
    sum += centered[k];
  }
  const double cov_mean = sum / count;
  double ss = 0.0;
  for (double c : centered) ss += (c - cov_mean) * (c - cov_mean);
  double valid_mass = 0.0;
  for (Index n = 0; n < s.born.size(); ++n) {
    if (s.valid[static_cast<std::size_t>(n)]) valid_mass += s.born[n];
  }
  EnsembleAverage out;
  out.method = AverageMethod::monte_carlo;
  out.masked_weight = s.masked_weight;
  out.samples = draws.size();
  // Unbiased sample covariance; the stderr of the centered-product mean.
  out.value = valid_mass * sum / (count - 1.0);
  out.mc_stderr = valid_mass * std::sqrt(ss / (count - 1.0) / count);
  return out;
}

EnsembleAverage variance(const CValField& field, const StateVector& psi,
                         const OrthonormalBasis& basis, const XiModel& model,
                         const AverageOptions& options) {
  return covariance(field, field, psi, basis, model, options);
}

EnsembleAverage statistical_deviation(const CValField& a, const CValField& b,
                                      const StateVector& psi, const OrthonormalBasis& basis,
                                      const XiModel& model, const AverageOptions& options) {
  check_pair(a, b);
  check_provenance(a, psi, basis);
  check_model(a, model);
  require_hermitian(a, "statistical_deviation");
  require_hermitian(b, "statistical_deviation");
  Integrand f{[&](Index n) -> Coeffs {
                const double dr = a.re_part[n] - b.re_part[n];
                const double di = a.im_part[n] - b.im_part[n];
                return {dr * dr, 2.0 * dr * di, di * di, 0.0};
              },
              [&](Index n, double xi) -> cplx {
                const double d = a.evaluate(n, xi) - b.evaluate(n, xi);
                return d * d;
              }};
  return integrate(support_of(a), model, options, f);
}

EquivalenceResult equivalence_theorem(const OperatorMatrix& a, const OperatorMatrix& b,
                                      const std::vector<double>& poly, const OperatorMatrix& c,
                                      const StateVector& psi, const XiModel& model,
                                      const AverageOptions& options) {
  if (!c.hermitian() && !c.is_numerically_hermitian()) {
    throw NotHermitian("equivalence theorem needs a Hermitian C");
  }
  const Eigensystem es = eigenbasis(c);
  const CValField fa = build_cval(a, psi, es.basis, model);
  const CValField fb = build_cval(b, psi, es.basis, model);
  auto f_of = [&](double x) {
    double acc = 0.0;
    for (auto k = poly.rbegin(); k != poly.rend(); ++k) acc = acc * x + *k;
    return acc;
  };
  Integrand f{[&](Index n) -> Coeffs {
                const double ar = fa.re_part[n], ai = fa.im_part[n];
                const double br = fb.re_part[n], bi = fb.im_part[n];
                return {ar * br + f_of(es.eigenvalues[n]), ar * bi + ai * br, ai * bi, 0.0};
              },
              [&](Index n, double xi) -> cplx {
                return fa.evaluate(n, xi) * fb.evaluate(n, xi) + f_of(es.eigenvalues[n]);
              }};
  EquivalenceResult out;
  out.average = integrate(support_of(fa), model, options, f);

  const Index d = c.dim();
  CMatrix f_c = CMatrix::Zero(d, d);
  CMatrix power = CMatrix::Identity(d, d);
  for (double coeff : poly) {
    f_c += coeff * power;
    power = power * c.matrix();
  }
  const CMatrix sym =
      0.5 * (a.matrix().adjoint() * b.matrix() + b.matrix().adjoint() * a.matrix());
  out.oracle = expectation(CMatrix(sym + f_c), psi);
  return out;
}

SeparableXiReport separable_xi_product(const OperatorMatrix& a_local,
                                       const OperatorMatrix& b_local, const StateVector& psi,
                                       const OrthonormalBasis& basis_a,
                                       const OrthonormalBasis& basis_b, const XiModel& model_a,
                                       const XiModel& model_b, const AverageOptions& options) {
  const Index da = a_local.dim();
  const Index db = b_local.dim();
  if (basis_a.dim() != da || basis_b.dim() != db || psi.dim() != da * db) {
    throw DimensionMismatch("separable_xi_product: local dimensions do not tile the state");
  }
  if (model_a.hbar() != model_b.hbar()) {
    throw InvalidModel("local xi models must share hbar");
  }
  const OrthonormalBasis basis = basis_a.tensor(basis_b);
  const OperatorMatrix big_a = presets::kron(a_local, OperatorMatrix::identity(db));
  const OperatorMatrix big_b = presets::kron(OperatorMatrix::identity(da), b_local);
  const CValField fa = build_cval(big_a, psi, basis, model_a);
  const CValField fb = build_cval(big_b, psi, basis, model_b);

  SeparableXiReport out;
  out.global = product_average(fa, fb, psi, basis, model_a, options);

  const Support s = support_of(fa);
  out.separable.method = options.method;
  out.separable.masked_weight = s.masked_weight;
  switch (options.method) {
    case AverageMethod::exact: {
      const auto ma = model_a.reduced_moments();
      const auto mb = model_b.reduced_moments();
      for (Index n = 0; n < s.born.size(); ++n) {
        if (!s.valid[static_cast<std::size_t>(n)]) continue;
        const double ar = fa.re_part[n], ai = fa.im_part[n];
        const double br = fb.re_part[n], bi = fb.im_part[n];
        out.separable.value += s.born[n] * (ar * br + ma[1] * ai * br + mb[1] * ar * bi +
                                            ma[1] * mb[1] * ai * bi);
      }
      out.separable.samples = static_cast<std::size_t>(s.born.size());
      break;
    }
    case AverageMethod::enumerated: {
      const auto sa = model_a.support();
      const auto sb = model_b.support();
      for (Index n = 0; n < s.born.size(); ++n) {
        if (!s.valid[static_cast<std::size_t>(n)]) continue;
        for (const auto& [xa, pa] : sa) {
          for (const auto& [xb, pb] : sb) {
            out.separable.value += s.born[n] * pa * pb * fa.evaluate(n, xa) * fb.evaluate(n, xb);
            ++out.separable.samples;
          }
        }
      }
      break;
    }
    case AverageMethod::monte_carlo: {
      const auto draws = draw_joint(s.born, s.valid, model_a, options.samples, options.seed,
                                    options.workers);
      XiSampler xb(model_b.with_seed(mix_seed(options.seed, 0xb)), 0);
      double valid_mass = 0.0;
      for (Index n = 0; n < s.born.size(); ++n) {
        if (s.valid[static_cast<std::size_t>(n)]) valid_mass += s.born[n];
      }
      std::vector<double> values(draws.size());
      double sum = 0.0;
      for (std::size_t k = 0; k < draws.size(); ++k) {
        values[k] = fa.evaluate(draws[k].n, draws[k].xi) * fb.evaluate(draws[k].n, xb());
        sum += values[k];
      }
      const double count = static_cast<double>(draws.size());
      const double mean = sum / count;
      double ss = 0.0;
      for (double v : values) ss += (v - mean) * (v - mean);
      out.separable.value = valid_mass * mean;
      out.separable.mc_stderr = valid_mass * std::sqrt(ss / (count - 1.0) / count);
      out.separable.samples = draws.size();
      break;
    }
  }
  const auto ma = model_a.reduced_moments();
  for (Index n = 0; n < s.born.size(); ++n) {
    if (s.valid[static_cast<std::size_t>(n)]) {
      out.cross_term += s.born[n] * fa.im_part[n] * fb.im_part[n];
    }
  }
  out.cross_term *= ma[2];
  out.residual = std::abs(out.global.value - out.separable.value - out.cross_term);
  return out;
}

EnsembleAverage mixed_product_average(const MixedEnsemble& ensemble, const OperatorMatrix& a,
                                      const OperatorMatrix& b, const OrthonormalBasis& basis,
                                      const XiModel& model, const AverageOptions& options) {
  EnsembleAverage out;
  out.method = options.method;
  double var_sum = 0.0;
  for (std::size_t mu = 0; mu < ensemble.size(); ++mu) {
    const StateVector& psi = ensemble.states()[mu];
    const CValField fa = build_cval(a, psi, basis, model);
    const CValField fb = build_cval(b, psi, basis, model);
    AverageOptions sub = options;
    sub.seed = mix_seed(options.seed, mu);
    const EnsembleAverage part = product_average(fa, fb, psi, basis, model, sub);
    const double w = ensemble.weights()[mu];
    out.value += w * part.value;
    out.masked_weight += w * part.masked_weight;
    out.samples += part.samples;
    if (part.mc_stderr) var_sum += w * w * *part.mc_stderr * *part.mc_stderr;
  }
  if (options.method == AverageMethod::monte_carlo) out.mc_stderr = std::sqrt(var_sum);
  return out;
}

VerificationRecord make_record(std::string operation, std::vector<std::uint64_t> input_ids,
                               const EnsembleAverage& average, cplx oracle) {
  VerificationRecord r;
  r.operation = std::move(operation);
  r.input_ids = std::move(input_ids);
  r.method = average.method;
  r.value = average.value;
  r.oracle = oracle;
  r.abs_error = std::abs(average.value - oracle);
  r.masked_weight = average.masked_weight;
  r.mc_stderr = average.mc_stderr;
  return r;
}

}  // namespace cvl
