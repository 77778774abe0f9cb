#include "sample.hpp"

#include <cmath>
#include <functional>
#include <iomanip>
#include <optional>
#include <ostream>

#include "cvl/io.hpp"
#include "cvl/random.hpp"
#include "cvl/statistics.hpp"

namespace cvl::cli {

OperatorMatrix parse_operator_spec(const std::string& spec) {
  if (spec == "sigma_x") return presets::sigma_x();
  if (spec == "sigma_y") return presets::sigma_y();
  if (spec == "sigma_z") return presets::sigma_z();
  if (spec == "spin1_x") return presets::spin1_x();
  if (spec == "spin1_y") return presets::spin1_y();
  if (spec == "spin1_z") return presets::spin1_z();
  return io::load_matrix_file(spec);
}

namespace {

OrthonormalBasis parse_basis_spec(const std::string& spec, Index dim, Rng& rng) {
  if (spec == "computational") return OrthonormalBasis::computational(dim);
  if (spec == "haar") return haar_basis(rng, dim);
  if (spec.rfind("eigen:", 0) == 0) {
    const OperatorMatrix op = parse_operator_spec(spec.substr(6));
    if (op.dim() != dim) throw DimensionMismatch("basis operator dimension mismatch");
    return eigenbasis(op).basis;
  }
  throw InvalidArgument("unknown basis spec '" + spec + "'");
}

StateVector parse_state_spec(const std::string& spec, Index dim, const OrthonormalBasis& basis,
                             Rng& rng) {
  if (spec == "haar") {
    const OrthonormalBasis* bases[] = {&basis};
    return haar_state_with_min_overlap(rng, dim, bases);
  }
  StateVector psi = [&] {
    if (spec == "plus") return presets::plus();
    if (spec == "minus") return presets::minus();
    if (spec == "plus_i") return presets::plus_i();
    if (spec == "bell") return presets::bell_phi_plus();
    try {
      std::size_t used = 0;
      const long k = std::stol(spec, &used);
      if (used == spec.size() && k >= 0 && k < dim) return StateVector::basis_state(dim, k);
    } catch (const std::exception&) {
    }
    throw InvalidArgument("unknown state spec '" + spec + "'");
  }();
  if (psi.dim() != dim) throw DimensionMismatch("state dimension differs from the operator's");
  return psi;
}

}  // namespace

int run_sample(const RunConfig& config, const SampleSpec& spec, std::ostream& out) {
  config.validate();
  if (spec.samples < 2) throw InvalidArgument("samples must be >= 2");
  if (spec.repeats < 1) throw InvalidArgument("repeats must be >= 1");
  Rng rng(config.seed);
  const OperatorMatrix a = parse_operator_spec(spec.op);
  const Index d = a.dim();
  const OrthonormalBasis basis = parse_basis_spec(spec.basis, d, rng);
  const StateVector psi = parse_state_spec(spec.state, d, basis, rng);
  const XiModel model = config.xi_model();
  const CValField fa = build_cval(a, psi, basis, model);
  std::optional<CValField> fb;
  if (!spec.op_b.empty()) {
    const OperatorMatrix b = parse_operator_spec(spec.op_b);
    if (b.dim() != d) throw DimensionMismatch("second operator dimension mismatch");
    fb = build_cval(b, psi, basis, model);
  }

  using Fn = EnsembleAverage (*)(const CValField&, const CValField&, const StateVector&,
                                 const OrthonormalBasis&, const XiModel&, const AverageOptions&);
  struct Quantity {
    std::string name;
    std::function<EnsembleAverage(const AverageOptions&)> eval;
  };
  std::vector<Quantity> quantities = {
      {"mean_cval", [&](const AverageOptions& o) { return mean_cval(fa, psi, basis, model, o); }},
      {"xi_weighted_mean",
       [&](const AverageOptions& o) { return xi_weighted_mean(fa, psi, basis, model, o); }},
  };
  if (fb) {
    auto pair = [&](const std::string& name, Fn fn) {
      quantities.push_back({name, [&, fn](const AverageOptions& o) {
                              return fn(fa, *fb, psi, basis, model, o);
                            }});
    };
    pair("product_average", &product_average);
    if (model.third_moment_vanishes()) pair("commutator_average", &commutator_average);
    if (fa.op_hermitian && fb->op_hermitian) pair("covariance", &covariance);
  }

  int outliers = 0;
  out << "quantity,exact,mc,stderr,n_samples\n" << std::setprecision(12);
  for (const auto& q : quantities) {
    const double exact = q.eval(AverageOptions{}).real();
    for (int r = 0; r < spec.repeats; ++r) {
      AverageOptions o;
      o.method = AverageMethod::monte_carlo;
      o.samples = static_cast<std::size_t>(spec.samples);
      o.seed = mix_seed(config.seed, static_cast<std::uint64_t>(r) + 1);
      o.workers = effective_workers(config);
      const EnsembleAverage mc = q.eval(o);
      if (std::abs(mc.real() - exact) > 4.0 * *mc.mc_stderr) ++outliers;
      out << q.name << ',' << exact << ',' << mc.real() << ',' << *mc.mc_stderr << ','
          << mc.samples << '\n';
    }
  }
  return outliers;
}

}  // namespace cvl::cli
