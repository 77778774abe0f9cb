#include "demos.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>

#include "cvl/contvar.hpp"
#include "cvl/io.hpp"
#include "cvl/random.hpp"
#include "cvl/statistics.hpp"
#include "cvl/uncertainty.hpp"

namespace cvl::cli {

namespace {

class Checklist {
 public:
  explicit Checklist(std::ostream& out) : out_(out) {}
  void check(const std::string& what, bool ok, double value) {
    out_ << "  [" << (ok ? "ok" : "FAILED") << "] " << what << " (" << std::setprecision(3)
         << std::scientific << value << std::defaultfloat << ")\n";
    pass_ = pass_ && ok;
  }
  bool pass() const { return pass_; }

 private:
  std::ostream& out_;
  bool pass_ = true;
};

std::ofstream open_artifact(const RunConfig& config, const std::string& file) {
  if (config.output_dir.empty()) return {};
  std::filesystem::create_directories(config.output_dir);
  std::ofstream f(std::filesystem::path(config.output_dir) / file);
  if (!f) throw InvalidArgument("cannot write " + file + " in " + config.output_dir);
  return f;
}

// Eigenbasis of n.sigma for the unit vector at polar angle theta, azimuth phi.
OrthonormalBasis tilted_qubit_basis(double theta, double phi) {
  const OperatorMatrix n = std::sin(theta) * std::cos(phi) * presets::sigma_x() +
                           std::sin(theta) * std::sin(phi) * presets::sigma_y() +
                           std::cos(theta) * presets::sigma_z();
  return eigenbasis(OperatorMatrix(n.matrix(), true)).basis;
}

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

bool demo_gaussian(const RunConfig& config, std::ostream& out) {
  const double sigma = 1.0, mass = 1.0, hbar = config.hbar;
  const GridWavefunction wf = build_gaussian({sigma, 0.0, 0.0, 0.0}, config.grid, hbar);
  const GridCVal h = hamiltonian_free_field(wf, mass);
  const double floor = hbar * hbar / (4.0 * mass * sigma * sigma);  // |H~(0)|
  double worst = 0.0;
  for (Index j = 0; j < h.size(); ++j) {
    if (!h.is_valid(j)) continue;
    const double exact = gaussian_hamiltonian_exact(wf.grid().q(j), sigma, mass, hbar);
    worst = std::max(worst, std::abs(h.estimate[j] - exact) / std::max(std::abs(exact), floor));
  }
  const auto changes = hamiltonian_sign_changes(h, wf.grid());
  const double root = std::sqrt(2.0) * sigma;
  double root_miss = changes.size() == 2 ? 0.0 : 1e300;
  for (double q : changes) root_miss = std::max(root_miss, std::abs(std::abs(q) - root));
  const AverageEquality avg = average_equality_check(wf, mass, config.xi_model());
  const double target = hbar * hbar / (8.0 * mass * sigma * sigma);
  const BoundReport krs = position_momentum_krs(wf, config.xi_model());

  out << "gaussian: sigma=" << sigma << " m=" << mass << " hbar=" << hbar << " grid=["
      << wf.grid().q_min << ", " << wf.grid().q_max << "] x " << wf.grid().points << "\n"
      << std::setprecision(12) << "  <H~>        = " << avg.h_cval << "\n"
      << "  <p^2/2m>    = " << avg.kinetic_spectral << " (spectral)\n"
      << "  <p~^2/2m>   = " << avg.p_cval_sq << "\n"
      << "  hbar^2/8m s^2 = " << target << "\n"
      << "  H~ < 0 for |q| > " << root << "; sign changes at";
  for (double q : changes) out << ' ' << q;
  out << "\n  sigma_q^2 sigma_p~^2 = " << krs.lhs << ", bound = " << krs.rhs << "\n";
  Checklist c(out);
  c.check("H~ matches closed form (relative)", worst <= tol::kGrid, worst);
  c.check("sign change at q^2 = 2 sigma^2 within one cell", root_miss <= wf.grid().dq(), root_miss);
  c.check("<H~> = hbar^2/8m sigma^2", rel(avg.h_cval, target) <= tol::kGrid, rel(avg.h_cval, target));
  c.check("<p~^2/2m> = hbar^2/8m sigma^2", rel(avg.p_cval_sq, target) <= tol::kGrid,
          rel(avg.p_cval_sq, target));
  c.check("spectral <p^2/2m> = hbar^2/8m sigma^2", rel(avg.kinetic_spectral, target) <= tol::kGrid,
          rel(avg.kinetic_spectral, target));
  c.check("KRS saturates at hbar^2/4", rel(krs.lhs, 0.25 * hbar * hbar) <= tol::kGrid,
          rel(krs.lhs, 0.25 * hbar * hbar));

  if (auto f = open_artifact(config, "gaussian_profile.csv"); f.is_open()) {
    io::write_profile_csv(f, wf, mass);
  }
  if (auto f = open_artifact(config, "gaussian_energy.csv"); f.is_open()) {
    f << "q,h_tilde,h_exact\n" << std::setprecision(12);
    for (Index j = 0; j < h.size(); ++j) {
      if (!h.is_valid(j)) continue;
      const double q = wf.grid().q(j);
      f << q << ',' << h.estimate[j] << ',' << gaussian_hamiltonian_exact(q, sigma, mass, hbar)
        << '\n';
    }
  }
  return c.pass();
}

bool demo_plane_wave(const RunConfig& config, std::ostream& out) {
  const double p0 = 1.5, mass = 1.0, hbar = config.hbar;
  const PlateauEnvelope env{-60.0, 60.0, 1.0};
  const Grid grid{-80.0, 80.0, 8192};
  const GridWavefunction wf = build_plane_wave(p0, env, grid, hbar);
  const GridCVal p = momentum_field(wf);
  const GridCVal h = hamiltonian_free_field(wf, mass);
  double p_dev = 0.0, h_dev = 0.0;
  for (Index j = 0; j < p.size(); ++j) {
    const double q = grid.q(j);
    if (q < env.interior_min() || q > env.interior_max()) continue;
    for (double xi : {hbar, -hbar, 0.0}) {
      p_dev = std::max(p_dev, std::abs(p.value(j, xi) - p0));
      h_dev = std::max(h_dev, std::abs(h.value(j, xi) - p0 * p0 / (2.0 * mass)));
    }
  }
  const AverageEquality avg = average_equality_check(wf, mass, config.xi_model());
  // Each tanh edge adds hbar^2 (1/3w) / (2m L) of kinetic energy.
  const double edge = hbar * hbar * (2.0 / (3.0 * env.width)) / (2.0 * mass * (env.b - env.a));
  const double excess = avg.kinetic_spectral - p0 * p0 / (2.0 * mass);
  const BoundReport krs = position_momentum_krs(wf, config.xi_model());

  out << "plane_wave: p0=" << p0 << " plateau [" << env.a << ", " << env.b << "] edge width "
      << env.width << "\n"
      << std::setprecision(12) << "  <H~>      = " << avg.h_cval << "\n"
      << "  <p^2/2m>  = " << avg.kinetic_spectral << " (spectral)\n"
      << "  <p~^2/2m> = " << avg.p_cval_sq << "\n"
      << "  p0^2/2m   = " << p0 * p0 / (2.0 * mass) << ", edge correction ~ " << edge << "\n"
      << "  sigma_q^2 sigma_p~^2 = " << krs.lhs << " >= " << krs.rhs << "\n";
  Checklist c(out);
  c.check("interior p~ = p0 for every xi", p_dev <= tol::kGrid, p_dev);
  c.check("interior H~ = p0^2/2m for every xi", h_dev <= tol::kGrid, h_dev);
  c.check("<H~> = <p^2/2m>", rel(avg.h_cval, avg.kinetic_spectral) <= tol::kGrid,
          rel(avg.h_cval, avg.kinetic_spectral));
  c.check("<p~^2/2m> = <p^2/2m>", rel(avg.p_cval_sq, avg.kinetic_spectral) <= tol::kGrid,
          rel(avg.p_cval_sq, avg.kinetic_spectral));
  c.check("kinetic excess matches edge correction", rel(excess, edge) <= 0.1, rel(excess, edge));
  c.check("position-momentum KRS holds", krs.slack >= 0.0, krs.slack);
  if (auto f = open_artifact(config, "plane_wave_profile.csv"); f.is_open()) {
    io::write_profile_csv(f, wf, mass);
  }
  return c.pass();
}

bool demo_qubit_krs(const RunConfig& config, std::ostream& out) {
  const XiModel model = config.xi_model();
  const OperatorMatrix sx = presets::sigma_x();
  const OperatorMatrix sy = presets::sigma_y();
  const OrthonormalBasis ex = eigenbasis(sx).basis;
  const OrthonormalBasis ey = eigenbasis(sy).basis;
  const OrthonormalBasis* bases[] = {&ex, &ey};
  std::vector<BoundReport> rows;
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 100; ++i) {
    const std::uint64_t seed = mix_seed(config.seed, static_cast<std::uint64_t>(i));
    Rng rng(seed);
    const StateVector psi = haar_state_with_min_overlap(rng, 2, bases);
    for (BoundReport r : {schrodinger_bound(sx, sy, psi, model),
                          kennard_robertson_bound(sx, sy, psi, model),
                          krs_check(sx, sy, psi, model),
                          self_estimation_tradeoff(sx, sy, psi, model)}) {
      r.seed = seed;
      worst = std::min(worst, r.slack);
      rows.push_back(r);
    }
  }
  out << "qubit_krs: sigma_x, sigma_y over 100 Haar states (" << rows.size() << " bound reports)\n";
  out << "  kind                   lhs          rhs          slack\n" << std::setprecision(6);
  for (std::size_t i = 0; i < 8 && i < rows.size(); ++i) {
    out << "  " << std::left << std::setw(20) << to_string(rows[i].kind) << std::right
        << std::setw(13) << rows[i].lhs << std::setw(13) << rows[i].rhs << std::setw(13)
        << rows[i].slack << '\n';
  }
  out << "  ...\n";
  Checklist c(out);
  c.check("every slack >= -1e-10", worst >= -1e-10, worst);
  if (auto f = open_artifact(config, "qubit_krs.csv"); f.is_open()) io::write_csv(f, rows);
  return c.pass();
}

bool demo_bell_separable_xi(const RunConfig& config, std::ostream& out) {
  const XiModel model = config.xi_model();
  const XiModel model_b = model.with_seed(mix_seed(config.seed, 1));
  const OperatorMatrix sx = presets::sigma_x();
  const StateVector bell = presets::bell_phi_plus();
  const OrthonormalBasis local = tilted_qubit_basis(std::numbers::pi / 3.0, std::numbers::pi / 5.0);
  const SeparableXiReport r = separable_xi_product(sx, sx, bell, local, local, model, model_b);
  const double oracle = expectation(presets::kron(sx, sx), bell).real();
  out << "bell_separable_xi: a = b = sigma_x on (|00> + |11>)/sqrt(2), tilted product basis\n"
      << std::setprecision(12) << "  <psi|sigma_x sigma_x|psi> = " << oracle << "\n"
      << "  global xi product        = " << r.global.real() << "\n"
      << "  separable xi product     = " << r.separable.real() << "\n"
      << "  difference               = " << r.global.real() - r.separable.real() << "\n"
      << "  sum_n A_I B_I Pr(n)      = " << r.cross_term << "\n";
  Checklist c(out);
  c.check("global product reproduces the quantum correlation",
          std::abs(r.global.real() - oracle) <= 1e-10, std::abs(r.global.real() - oracle));
  c.check("difference equals the imaginary cross term", r.residual <= 1e-10, r.residual);
  c.check("separable product misses the correlation", std::abs(r.separable.real() - oracle) > 1e-3,
          std::abs(r.separable.real() - oracle));
  if (auto f = open_artifact(config, "bell_separable_xi.csv"); f.is_open()) {
    f << "quantity,value\n" << std::setprecision(17) << "oracle," << oracle << "\nglobal,"
      << r.global.real() << "\nseparable," << r.separable.real() << "\ncross_term,"
      << r.cross_term << "\nresidual," << r.residual << '\n';
  }
  return c.pass();
}

bool demo_mixed_context(const RunConfig& config, std::ostream& out) {
  const XiModel model = config.xi_model();
  const OperatorMatrix op = presets::sigma_x();
  const OrthonormalBasis basis = tilted_qubit_basis(std::numbers::pi / 3.0, std::numbers::pi / 5.0);
  const std::vector<std::pair<std::string, MixedEnsemble>> decomps = {
      {"z", MixedEnsemble({0.5, 0.5}, {StateVector::basis_state(2, 0), StateVector::basis_state(2, 1)})},
      {"x", MixedEnsemble({0.5, 0.5}, {presets::plus(), presets::minus()})},
  };
  std::vector<CValField> mixed;
  std::vector<std::vector<CValField>> parts;
  for (const auto& [name, ens] : decomps) {
    mixed.push_back(cval_mixed(op, ens, basis, model));
    parts.push_back(component_fields(op, ens, basis, model));
  }
  double mixed_gap = 0.0, part_gap = 0.0;
  for (Index n = 0; n < 2; ++n) {
    mixed_gap = std::max({mixed_gap, std::abs(mixed[0].re_part[n] - mixed[1].re_part[n]),
                          std::abs(mixed[0].im_part[n] - mixed[1].im_part[n])});
    part_gap = std::max({part_gap, std::abs(parts[0][0].re_part[n] - parts[1][0].re_part[n]),
                         std::abs(parts[0][0].im_part[n] - parts[1][0].im_part[n])});
  }
  const double p0 = mixed_product_average(decomps[0].second, op, op, basis, model).real();
  const double p1 = mixed_product_average(decomps[1].second, op, op, basis, model).real();
  out << "mixed_context: rho = 1/2 prepared as {|0>,|1>} and as {|+>,|->}, O = sigma_x\n"
      << std::setprecision(10);
  for (std::size_t k = 0; k < decomps.size(); ++k) {
    out << "  decomposition " << decomps[k].first << ":\n";
    for (std::size_t mu = 0; mu < parts[k].size(); ++mu) {
      out << "    component " << mu << ": O~(n, xi) = ";
      for (Index n = 0; n < 2; ++n) {
        out << (n ? " | " : "") << parts[k][mu].re_part[n] << " + (xi/hbar) "
            << parts[k][mu].im_part[n];
      }
      out << '\n';
    }
    out << "    mixed:       O~(n, xi) = ";
    for (Index n = 0; n < 2; ++n) {
      out << (n ? " | " : "") << mixed[k].re_part[n] << " + (xi/hbar) " << mixed[k].im_part[n];
    }
    out << '\n';
  }
  Checklist c(out);
  c.check("mixed fields agree across decompositions", mixed_gap <= 1e-10, mixed_gap);
  c.check("component fields differ across decompositions", part_gap > 1e-3, part_gap);
  c.check("mixed <O~ O~> agrees across decompositions", std::abs(p0 - p1) <= 1e-10,
          std::abs(p0 - p1));
  c.check("mixed <O~ O~> = Tr{rho O^2}", std::abs(p0 - 1.0) <= 1e-10, std::abs(p0 - 1.0));
  if (auto f = open_artifact(config, "mixed_context.csv"); f.is_open()) {
    f << "decomposition,component,n,re_part,im_part\n" << std::setprecision(17);
    for (std::size_t k = 0; k < decomps.size(); ++k) {
      for (std::size_t mu = 0; mu < parts[k].size(); ++mu) {
        for (Index n = 0; n < 2; ++n) {
          f << decomps[k].first << ',' << mu << ',' << n << ',' << parts[k][mu].re_part[n] << ','
            << parts[k][mu].im_part[n] << '\n';
        }
      }
      for (Index n = 0; n < 2; ++n) {
        f << decomps[k].first << ",mixed," << n << ',' << mixed[k].re_part[n] << ','
          << mixed[k].im_part[n] << '\n';
      }
    }
  }
  return c.pass();
}

}  // namespace

const std::vector<std::string>& demo_names() {
  static const std::vector<std::string> names = {"gaussian", "plane_wave", "qubit_krs",
                                                 "bell_separable_xi", "mixed_context"};
  return names;
}

bool run_demo(const std::string& name, const RunConfig& config, std::ostream& out) {
  config.validate();
  if (name == "gaussian") return demo_gaussian(config, out);
  if (name == "plane_wave") return demo_plane_wave(config, out);
  if (name == "qubit_krs") return demo_qubit_krs(config, out);
  if (name == "bell_separable_xi") return demo_bell_separable_xi(config, out);
  if (name == "mixed_context") return demo_mixed_context(config, out);
  throw InvalidArgument("unknown demo '" + name + "'");
}

}  // namespace cvl::cli
