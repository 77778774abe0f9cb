#include "cvl/contvar.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

namespace cvl {

void Grid::validate() const {
  if (points < 16) throw InvalidArgument("grid needs at least 16 points");
  if (!(q_max > q_min) || !std::isfinite(q_min) || !std::isfinite(q_max)) {
    throw InvalidArgument("grid needs finite q_min < q_max");
  }
}

// ---------------------------------------------------------------------------

GridWavefunction::GridWavefunction(Grid grid, CVector amplitudes, double hbar)
    : grid_(grid), psi_(std::move(amplitudes)), hbar_(hbar) {
  grid_.validate();
  if (!(hbar > 0.0)) throw InvalidArgument("hbar must be positive");
  if (psi_.size() != grid_.points) {
    throw DimensionMismatch("wavefunction length differs from the grid");
  }
  const double dq = grid_.dq();
  const double norm = psi_.squaredNorm() * dq;
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw InvariantViolation("wavefunction has zero or non-finite norm");
  }
  psi_ /= std::sqrt(norm);
  rho_ = psi_.cwiseAbs2();
  max_rho_ = rho_.maxCoeff();
  const Index n = grid_.points;
  if (rho_[0] > tol::kBoundary * max_rho_ || rho_[n - 1] > tol::kBoundary * max_rho_) {
    throw InvariantViolation("density does not vanish at the grid boundary");
  }
  s_.resize(n);
  double prev = std::arg(psi_[0]);
  double acc = prev;
  s_[0] = acc;
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (Index j = 1; j < n; ++j) {
    const double raw = std::arg(psi_[j]);
    double step = raw - prev;
    step -= two_pi * std::round(step / two_pi);
    acc += step;
    s_[j] = acc;
    prev = raw;
  }
  s_ *= hbar_;
}

double GridWavefunction::norm() const { return rho_.sum() * grid_.dq(); }

GridWavefunction build_gaussian(const GaussianSpec& spec, const Grid& grid, double hbar) {
  grid.validate();
  if (!(spec.sigma > 0.0)) throw InvalidArgument("gaussian width must be positive");
  if (spec.sigma / grid.dq() < 32.0) {
    throw InvalidArgument("grid under-resolves the gaussian (need >= 32 points per sigma)");
  }
  if (spec.q0 - 8.0 * spec.sigma < grid.q_min || spec.q0 + 8.0 * spec.sigma > grid.q_max) {
    throw InvalidArgument("grid must extend >= 8 sigma on each side of the centre");
  }
  CVector psi(grid.points);
  for (Index j = 0; j < grid.points; ++j) {
    const double x = grid.q(j) - spec.q0;
    const double phase = (spec.p0 * grid.q(j) + 0.5 * spec.chirp * x * x) / hbar;
    psi[j] = std::exp(-x * x / (4.0 * spec.sigma * spec.sigma)) * cplx(std::cos(phase), std::sin(phase));
  }
  return GridWavefunction(grid, std::move(psi), hbar);
}

GridWavefunction build_plane_wave(double p0, const PlateauEnvelope& env, const Grid& grid,
                                  double hbar) {
  grid.validate();
  if (!(env.width > 0.0) || !(env.b - env.a > 20.0 * env.width)) {
    throw InvalidArgument("plateau needs width > 0 and b - a > 20 widths");
  }
  if (env.width / grid.dq() < 16.0) {
    throw InvalidArgument("grid under-resolves the plateau edges (need >= 16 points per width)");
  }
  if (env.a - 14.0 * env.width < grid.q_min || env.b + 14.0 * env.width > grid.q_max) {
    throw InvalidArgument("plateau edges must sit >= 14 widths inside the grid");
  }
  CVector psi(grid.points);
  for (Index j = 0; j < grid.points; ++j) {
    const double q = grid.q(j);
    const double amp = 0.5 * (std::tanh((q - env.a) / env.width) - std::tanh((q - env.b) / env.width));
    const double phase = p0 * q / hbar;
    psi[j] = amp * cplx(std::cos(phase), std::sin(phase));
  }
  return GridWavefunction(grid, std::move(psi), hbar);
}

// ---------------------------------------------------------------------------

namespace {

Index reach(Stencil s) { return s == Stencil::fourth ? 2 : 1; }

double d1(const RVector& f, Index j, double h, Stencil s) {
  if (s == Stencil::second) return (f[j + 1] - f[j - 1]) / (2.0 * h);
  return (-f[j + 2] + 8.0 * f[j + 1] - 8.0 * f[j - 1] + f[j - 2]) / (12.0 * h);
}

double d2(const RVector& f, Index j, double h, Stencil s) {
  if (s == Stencil::second) return (f[j + 1] - 2.0 * f[j] + f[j - 1]) / (h * h);
  return (-f[j + 2] + 16.0 * f[j + 1] - 30.0 * f[j] + 16.0 * f[j - 1] - f[j - 2]) /
         (12.0 * h * h);
}

// Valid where rho clears the cutoff and the stencil fits.
std::vector<bool> valid_points(const GridWavefunction& wf, Stencil s, double* masked) {
  const Index n = wf.grid().points;
  const Index r = reach(s);
  std::vector<bool> valid(static_cast<std::size_t>(n), false);
  *masked = 0.0;
  for (Index j = 0; j < n; ++j) {
    const bool ok = j >= r && j < n - r && wf.rho()[j] >= tol::kRhoCutoff * wf.max_rho();
    valid[static_cast<std::size_t>(j)] = ok;
    if (!ok) *masked += wf.rho()[j] * wf.grid().dq();
  }
  return valid;
}

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// p psi = -i hbar d/dq psi, spectrally on the periodic extension of the grid.
CVector apply_momentum(const GridWavefunction& wf) {
  const Index n = wf.grid().points;
  std::vector<fftw_complex> buf(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) {
    buf[static_cast<std::size_t>(j)][0] = wf.amplitudes()[j].real();
    buf[static_cast<std::size_t>(j)][1] = wf.amplitudes()[j].imag();
  }
  fftw_plan forward;
  fftw_plan backward;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    forward = fftw_plan_dft_1d(static_cast<int>(n), buf.data(), buf.data(), FFTW_FORWARD,
                               FFTW_ESTIMATE);
    backward = fftw_plan_dft_1d(static_cast<int>(n), buf.data(), buf.data(), FFTW_BACKWARD,
                                FFTW_ESTIMATE);
  }
  fftw_execute(forward);
  const double period = static_cast<double>(n) * wf.grid().dq();
  const double dk = 2.0 * std::numbers::pi / period;
  for (Index j = 0; j < n; ++j) {
    Index m = j <= n / 2 ? j : j - n;
    if (2 * j == n) m = 0;  // drop the unpaired Nyquist mode
    const double scale = wf.hbar() * dk * static_cast<double>(m) / static_cast<double>(n);
    auto& c = buf[static_cast<std::size_t>(j)];
    c[0] *= scale;
    c[1] *= scale;
  }
  fftw_execute(backward);
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }
  CVector out(n);
  for (Index j = 0; j < n; ++j) {
    out[j] = {buf[static_cast<std::size_t>(j)][0], buf[static_cast<std::size_t>(j)][1]};
  }
  return out;
}

}  // namespace

double GridCVal::value(Index j, double xi) const {
  if (j < 0 || j >= size()) throw InvalidArgument("grid index out of range");
  if (!is_valid(j)) throw MaskedEntry("c-value requested at a masked grid point");
  return estimate[j] + (xi / hbar) * error_coefficient[j];
}

GridCVal momentum_field(const GridWavefunction& wf, Stencil stencil) {
  const Index n = wf.grid().points;
  const double h = wf.grid().dq();
  GridCVal f;
  f.hbar = wf.hbar();
  f.valid = valid_points(wf, stencil, &f.masked_probability);
  f.estimate = RVector::Zero(n);
  f.error_coefficient = RVector::Zero(n);
  for (Index j = 0; j < n; ++j) {
    if (!f.is_valid(j)) continue;
    f.estimate[j] = d1(wf.action(), j, h, stencil);
    f.error_coefficient[j] = -0.5 * wf.hbar() * d1(wf.rho(), j, h, stencil) / wf.rho()[j];
  }
  return f;
}

GridCVal hamiltonian_free_field(const GridWavefunction& wf, double mass, Stencil stencil) {
  if (!(mass > 0.0)) throw InvalidArgument("mass must be positive");
  const Index n = wf.grid().points;
  const double h = wf.grid().dq();
  const double hbar = wf.hbar();
  const RVector amp = wf.rho().cwiseSqrt();
  RVector current(n);  // rho S'
  for (Index j = 0; j < n; ++j) {
    const bool inner = j >= reach(stencil) && j < n - reach(stencil);
    current[j] = inner ? wf.rho()[j] * d1(wf.action(), j, h, stencil) : 0.0;
  }
  GridCVal f;
  f.hbar = hbar;
  f.valid = valid_points(wf, stencil, &f.masked_probability);
  f.estimate = RVector::Zero(n);
  f.error_coefficient = RVector::Zero(n);
  const Index r = reach(stencil);
  for (Index j = 0; j < n; ++j) {
    if (!f.is_valid(j)) continue;
    const double sp = d1(wf.action(), j, h, stencil);
    const double quantum = d2(amp, j, h, stencil) / amp[j];
    f.estimate[j] = sp * sp / (2.0 * mass) - hbar * hbar / (2.0 * mass) * quantum;
    // The current derivative needs its neighbours' S' too; fall back to the
    // product rule where those neighbours lie outside the stencil band.
    double dcurrent;
    if (j >= 2 * r && j < n - 2 * r) {
      dcurrent = d1(current, j, h, stencil);
    } else {
      dcurrent = d1(wf.rho(), j, h, stencil) * sp + wf.rho()[j] * d2(wf.action(), j, h, stencil);
    }
    f.error_coefficient[j] = -0.5 * hbar * dcurrent / (mass * wf.rho()[j]);
  }
  return f;
}

double cval_momentum(const GridWavefunction& wf, Index j, double xi, Stencil stencil) {
  return momentum_field(wf, stencil).value(j, xi);
}

double cval_hamiltonian_free(const GridWavefunction& wf, Index j, double xi, double mass,
                             Stencil stencil) {
  return hamiltonian_free_field(wf, mass, stencil).value(j, xi);
}

double gaussian_hamiltonian_exact(double q, double sigma, double mass, double hbar) {
  const double s2 = sigma * sigma;
  return -(hbar * hbar / (2.0 * mass)) * (-1.0 / (2.0 * s2) + q * q / (4.0 * s2 * s2));
}

SpectralMoments spectral_moments(const GridWavefunction& wf) {
  const CVector p_psi = apply_momentum(wf);
  const double dq = wf.grid().dq();
  SpectralMoments m;
  for (Index j = 0; j < wf.grid().points; ++j) {
    const cplx bra = std::conj(wf.amplitudes()[j]);
    m.p += (bra * p_psi[j]).real() * dq;
    m.p2 += std::norm(p_psi[j]) * dq;
    m.sym_qp += (bra * wf.grid().q(j) * p_psi[j]).real() * dq;
  }
  return m;
}

double mean_cval_momentum(const GridWavefunction& wf, const XiModel& model, Stencil stencil) {
  const GridCVal p = momentum_field(wf, stencil);
  const auto m = model.reduced_moments();
  double sum = 0.0;
  for (Index j = 0; j < p.size(); ++j) {
    if (!p.is_valid(j)) continue;
    sum += wf.rho()[j] * (p.estimate[j] + m[1] * p.error_coefficient[j]);
  }
  return sum * wf.grid().dq();
}

AverageEquality average_equality_check(const GridWavefunction& wf, double mass,
                                       const XiModel& model, Stencil stencil) {
  if (model.hbar() != wf.hbar()) throw ProvenanceMismatch("xi model hbar differs from the grid's");
  const GridCVal h = hamiltonian_free_field(wf, mass, stencil);
  const GridCVal p = momentum_field(wf, stencil);
  const auto m = model.reduced_moments();
  const double dq = wf.grid().dq();
  AverageEquality out;
  out.masked_probability = h.masked_probability;
  for (Index j = 0; j < h.size(); ++j) {
    if (!h.is_valid(j)) continue;
    const double w = wf.rho()[j] * dq;
    out.h_cval += w * (h.estimate[j] + m[1] * h.error_coefficient[j]);
    const double e = p.estimate[j];
    const double c = p.error_coefficient[j];
    out.p_cval_sq += w * (e * e + 2.0 * m[1] * e * c + m[2] * c * c) / (2.0 * mass);
  }
  out.kinetic_spectral = spectral_moments(wf).p2 / (2.0 * mass);
  return out;
}

std::vector<double> rho_identity_residuals(const GridWavefunction& wf, Stencil stencil) {
  double masked = 0.0;
  const std::vector<bool> valid = valid_points(wf, stencil, &masked);
  const double h = wf.grid().dq();
  const RVector amp = wf.rho().cwiseSqrt();
  std::vector<double> out(valid.size(), 0.0);
  for (Index j = 0; j < wf.grid().points; ++j) {
    if (!valid[static_cast<std::size_t>(j)]) continue;
    const double rho = wf.rho()[j];
    const double lg = d1(wf.rho(), j, h, stencil) / rho;
    const double t1 = 0.25 * lg * lg;
    const double t2 = d2(amp, j, h, stencil) / amp[j];
    const double t3 = 0.5 * d2(wf.rho(), j, h, stencil) / rho;
    const double scale = std::abs(t1) + std::abs(t2) + std::abs(t3);
    out[static_cast<std::size_t>(j)] = scale > 0.0 ? std::abs(t1 + t2 - t3) / scale : 0.0;
  }
  return out;
}

BoundReport position_momentum_krs(const GridWavefunction& wf, const XiModel& model,
                                  Stencil stencil) {
  if (model.hbar() != wf.hbar()) throw ProvenanceMismatch("xi model hbar differs from the grid's");
  const GridCVal p = momentum_field(wf, stencil);
  const auto m = model.reduced_moments();
  const double dq = wf.grid().dq();
  double mq = 0.0, mq2 = 0.0, mp = 0.0, mp2 = 0.0;
  for (Index j = 0; j < wf.grid().points; ++j) {
    const double w = wf.rho()[j] * dq;
    const double q = wf.grid().q(j);
    mq += w * q;
    mq2 += w * q * q;
    if (!p.is_valid(j)) continue;
    const double e = p.estimate[j];
    const double c = p.error_coefficient[j];
    mp += w * (e + m[1] * c);
    mp2 += w * (e * e + 2.0 * m[1] * e * c + m[2] * c * c);
  }
  const SpectralMoments sm = spectral_moments(wf);
  const double cov = sm.sym_qp - mq * sm.p;
  BoundReport r;
  r.kind = BoundKind::position_momentum;
  r.lhs = (mq2 - mq * mq) * (mp2 - mp * mp);
  r.rhs = cov * cov + 0.25 * wf.hbar() * wf.hbar();
  r.slack = r.lhs - r.rhs;
  r.masked_weight = p.masked_probability;
  return r;
}

std::vector<double> hamiltonian_sign_changes(const GridCVal& h, const Grid& grid) {
  std::vector<double> out;
  Index prev = -1;
  for (Index j = 0; j < h.size(); ++j) {
    if (!h.is_valid(j)) continue;
    if (prev >= 0 && j == prev + 1) {
      const double a = h.estimate[prev];
      const double b = h.estimate[j];
      if ((a < 0.0) != (b < 0.0)) {
        out.push_back(grid.q(prev) + grid.dq() * a / (a - b));
      }
    }
    prev = j;
  }
  return out;
}

}  // namespace cvl
