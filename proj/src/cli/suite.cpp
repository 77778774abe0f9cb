#include "suite.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>

#include "cvl/estimation.hpp"
#include "cvl/io.hpp"
#include "cvl/parallel.hpp"
#include "cvl/random.hpp"
#include "cvl/statistics.hpp"
#include "cvl/uncertainty.hpp"

namespace cvl::cli {

namespace {

struct CheckSpec {
  const char* name;
  CheckKind kind;
  double threshold;
};

// Order fixes the report layout.
constexpr CheckSpec kChecks[] = {
    {"weak_value_routes", CheckKind::error, 1e-10},
    {"recover_weak_value", CheckKind::error, 1e-10},
    {"expectation_real", CheckKind::error, 1e-10},
    {"expectation_imag", CheckKind::error, 1e-10},
    {"product_average", CheckKind::error, 1e-10},
    {"commutator_average", CheckKind::error, 1e-10},
    {"full_product", CheckKind::error, 1e-10},
    {"covariance", CheckKind::error, 1e-10},
    {"variance", CheckKind::error, 1e-10},
    {"statistical_deviation", CheckKind::error, 1e-10},
    {"variance_basis_spread", CheckKind::error, 1e-9},
    {"variance_decomposition", CheckKind::error, 1e-10},
    {"eigenbasis_error_term", CheckKind::error, 1e-12},
    {"schrodinger_bound", CheckKind::slack, 1e-10},
    {"kennard_robertson_bound", CheckKind::slack, 1e-10},
    {"krs_full", CheckKind::slack, 1e-10},
    {"krs_split", CheckKind::error, 1e-10},
    {"estimation_tradeoff", CheckKind::slack, 1e-10},
    {"optimal_ms_error", CheckKind::error, 1e-10},
    {"conditional_bias", CheckKind::error, 1e-12},
    {"epistemic_restriction", CheckKind::error, 1e-6},
};

struct Observation {
  double value = 0.0;  // error or slack
  double masked = 0.0;
};

using TrialResult = std::map<std::string, Observation>;

TrialResult run_trial(int dim, Rng& rng, const XiModel& model) {
  TrialResult out;
  auto err = [&](const char* name, double e, double masked = 0.0) {
    auto& o = out[name];
    o.value = std::max(o.value, e);
    o.masked = std::max(o.masked, masked);
  };
  auto slack = [&](const char* name, const BoundReport& r) {
    out[name] = {r.slack, r.masked_weight};
  };

  const Index d = dim;
  const OrthonormalBasis basis = haar_basis(rng, d);
  const OperatorMatrix ga = random_operator(rng, d);
  const OperatorMatrix gb = random_operator(rng, d);
  const OperatorMatrix ha = random_hermitian(rng, d);
  const OperatorMatrix hb = random_hermitian(rng, d);
  const OrthonormalBasis eig_a = eigenbasis(ha).basis;
  const OrthonormalBasis eig_b = eigenbasis(hb).basis;
  const OrthonormalBasis* bases[] = {&basis, &eig_a, &eig_b};
  const StateVector psi = haar_state_with_min_overlap(rng, d, bases);

  // Weak values and c-values of general operators.
  const WeakValueField wa = weak_value_field(ga, psi, basis);
  const WeakValueField wb = weak_value_field(gb, psi, basis);
  const CValField fa = build_cval(ga, psi, basis, model);
  const CValField fb = build_cval(gb, psi, basis, model);
  for (Index n = 0; n < d; ++n) {
    const StateVector phi = basis.vector(n);
    const WeakValueParts parts = weak_value_parts(ga, psi, phi);
    const cplx w = weak_value(ga, psi, phi);
    err("weak_value_routes", std::abs(w - cplx(parts.real, parts.imag)) / (1.0 + std::abs(w)));
    const cplx rec = recover_weak_value(fa, n, model.hbar());
    err("recover_weak_value", std::abs(rec - w) / (1.0 + std::abs(w)));
  }
  const cplx ea = expectation(ga, psi);
  const EnsembleAverage m = mean_cval(fa, psi, basis, model);
  const EnsembleAverage xm = xi_weighted_mean(fa, psi, basis, model);
  err("expectation_real", std::abs(m.real() - ea.real()), m.masked_weight);
  err("expectation_imag", std::abs(xm.real() - ea.imag()), xm.masked_weight);

  const CMatrix& a = ga.matrix();
  const CMatrix& b = gb.matrix();
  const cplx sym = expectation(CMatrix(0.5 * (a.adjoint() * b + b.adjoint() * a)), psi);
  const cplx anti = expectation(CMatrix(a.adjoint() * b - b.adjoint() * a), psi) / cplx(0.0, 2.0);
  const cplx full = expectation(CMatrix(a.adjoint() * b), psi);
  const EnsembleAverage pa = product_average(fa, fb, psi, basis, model);
  err("product_average", std::abs(pa.value - sym), pa.masked_weight);
  if (model.third_moment_vanishes()) {
    const EnsembleAverage ca = commutator_average(fa, fb, psi, basis, model);
    const EnsembleAverage fp = full_product_representation(fa, fb, psi, basis, model);
    err("commutator_average", std::abs(ca.value - anti), ca.masked_weight);
    err("full_product", std::abs(fp.value - full) +
                            std::abs(weak_value_correlation(wa, wb) - full),
        fp.masked_weight);
  }

  // Hermitian pair.
  const CValField fha = build_cval(ha, psi, basis, model);
  const CValField fhb = build_cval(hb, psi, basis, model);
  const double mean_a = expectation(ha, psi).real();
  const double mean_b = expectation(hb, psi).real();
  const double cov_oracle = 0.5 * expectation(anticommutator(ha, hb), psi).real() - mean_a * mean_b;
  const double var_oracle = expectation(CMatrix(ha.matrix() * ha.matrix()), psi).real() - mean_a * mean_a;
  const CMatrix diff = ha.matrix() - hb.matrix();
  const double dev_oracle = expectation(CMatrix(diff * diff), psi).real();
  err("covariance", std::abs(covariance(fha, fhb, psi, basis, model).real() - cov_oracle));
  const double var_here = variance(fha, psi, basis, model).real();
  err("variance", std::abs(var_here - var_oracle));
  err("statistical_deviation",
      std::abs(statistical_deviation(fha, fhb, psi, basis, model).real() - dev_oracle));

  double lo = var_here, hi = var_here;
  for (const OrthonormalBasis* other : {&eig_a, &eig_b}) {
    const double v = variance(build_cval(ha, psi, *other, model), psi, *other, model).real();
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  err("variance_basis_spread", hi - lo);

  const VarianceDecomposition dec = decompose_variance(ha, psi, basis, model);
  err("variance_decomposition",
      dec.residual() + std::abs(dec.total - var_oracle),
      dec.masked_weight);
  err("eigenbasis_error_term", std::abs(decompose_variance(ha, psi, eig_a, model).err_sq));

  slack("schrodinger_bound", schrodinger_bound(ha, hb, psi, model));
  slack("kennard_robertson_bound", kennard_robertson_bound(ha, hb, psi, model));
  const BoundReport krs = krs_check(ha, hb, psi, model);
  slack("krs_full", krs);
  err("krs_split", krs.aux_residual, krs.masked_weight);
  const BoundReport trade = self_estimation_tradeoff(ha, hb, psi, model);
  slack("estimation_tradeoff", trade);

  const EstimationProblem problem(ha, psi, hb);
  const EstimatorField t = optimal_estimator(problem, model);
  const EstimationReport er = ms_error(t, problem, model);
  const double err_sq = decompose_variance(ha, psi, problem.basis, model).err_sq;
  err("optimal_ms_error", std::abs(er.ms_error - err_sq) + std::abs(er.ms_decomposed - err_sq),
      er.masked_weight);
  const CValField fe = build_cval(ha, psi, problem.basis, model);
  for (double xi : {model.hbar(), -model.hbar(), 0.37 * model.hbar()}) {
    err("conditional_bias", std::abs(conditional_bias(t, fe, xi)));
  }

  const EpistemicReport ep = epistemic_restriction_check(ha, hb, psi, 1e-4 * model.hbar(), model.hbar());
  err("epistemic_restriction", ep.max_richardson(), ep.masked_weight);
  return out;
}

}  // namespace

SuiteReport run_verify(const RunConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const XiModel model = config.xi_model();

  struct Job {
    int dim;
    int trial;
  };
  std::vector<Job> jobs;
  for (int d : config.dims) {
    for (int t = 0; t < config.trials; ++t) jobs.push_back({d, t});
  }
  std::vector<TrialResult> results(jobs.size());
  parallel_for(jobs.size(), effective_workers(config), [&](std::size_t i) {
    Rng rng(mix_seed(config.seed, static_cast<std::uint64_t>(jobs[i].dim),
                     static_cast<std::uint64_t>(jobs[i].trial)));
    results[i] = run_trial(jobs[i].dim, rng, model);
  });

  SuiteReport report;
  report.seed = config.seed;
  report.xi = std::string(to_string(config.xi));
  for (const CheckSpec& spec : kChecks) {
    CheckRecord rec;
    rec.name = spec.name;
    rec.kind = spec.kind;
    rec.threshold = spec.threshold;
    rec.min_slack = std::numeric_limits<double>::infinity();
    for (const TrialResult& r : results) {
      const auto it = r.find(spec.name);
      if (it == r.end()) continue;
      ++rec.instances;
      rec.masked_weight_max = std::max(rec.masked_weight_max, it->second.masked);
      if (spec.kind == CheckKind::error) {
        rec.max_abs_error = std::max(rec.max_abs_error, it->second.value);
      } else {
        rec.min_slack = std::min(rec.min_slack, it->second.value);
      }
    }
    if (config.corrupt_check == spec.name) {
      rec.max_abs_error += 1.0;
      rec.min_slack -= 1.0;
    }
    if (rec.instances == 0) continue;
    if (spec.kind == CheckKind::error) {
      rec.min_slack = 0.0;
      rec.pass = rec.max_abs_error <= spec.threshold;
    } else {
      rec.pass = rec.min_slack >= -spec.threshold;
    }
    report.pass = report.pass && rec.pass;
    report.records.push_back(rec);
  }
  if (!config.corrupt_check.empty()) {
    bool known = false;
    for (const CheckSpec& spec : kChecks) known = known || config.corrupt_check == spec.name;
    if (!known) throw InvalidArgument("unknown check '" + config.corrupt_check + "'");
  }
  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

void write_report(std::ostream& out, const SuiteReport& report, Format format) {
  if (format == Format::csv) {
    out << "name,kind,instances,max_abs_error,min_slack,masked_weight_max,threshold,pass\n"
        << std::setprecision(6);
    for (const auto& r : report.records) {
      out << r.name << ',' << (r.kind == CheckKind::error ? "error" : "slack") << ','
          << r.instances << ',' << r.max_abs_error << ',' << r.min_slack << ','
          << r.masked_weight_max << ',' << r.threshold << ',' << (r.pass ? 1 : 0) << '\n';
    }
    return;
  }
  io::json checks = io::json::array();
  for (const auto& r : report.records) {
    checks.push_back({{"name", r.name},
                      {"kind", r.kind == CheckKind::error ? "error" : "slack"},
                      {"instances", r.instances},
                      {"max_abs_error", r.max_abs_error},
                      {"min_slack", r.min_slack},
                      {"masked_weight_max", r.masked_weight_max},
                      {"threshold", r.threshold},
                      {"pass", r.pass}});
  }
  io::json doc = {{"seed", report.seed},
                  {"xi", report.xi},
                  {"pass", report.pass},
                  {"checks", std::move(checks)},
                  {"runtime_seconds", report.runtime_seconds}};
  out << doc.dump(2) << '\n';
}

void print_summary(std::ostream& out, const SuiteReport& report) {
  for (const auto& r : report.records) {
    out << (r.pass ? "PASS " : "FAIL ") << std::left << std::setw(26) << r.name << std::right
        << " n=" << std::setw(5) << r.instances << std::scientific << std::setprecision(2);
    if (r.kind == CheckKind::error) {
      out << "  max_err=" << r.max_abs_error;
    } else {
      out << "  min_slack=" << r.min_slack;
    }
    out << "  tol=" << r.threshold << std::defaultfloat << '\n';
  }
  out << (report.pass ? "verify: PASS" : "verify: FAIL") << " (" << std::fixed
      << std::setprecision(2) << report.runtime_seconds << " s)" << std::defaultfloat << '\n';
}

}  // namespace cvl::cli
