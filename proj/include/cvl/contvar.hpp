#pragma once

// One-dimensional wavefunctions on a uniform grid in polar form
// psi = sqrt(rho) exp(iS/hbar), the c-valued momentum
//   p~ = S' - (xi/2) rho'/rho
// and free-particle energy
//   H~ = S'^2/2m - (hbar^2/2m) (sqrt rho)''/sqrt rho - (xi/2rho) (rho S'/m)'.
// Derivatives are real-space finite differences; oracle values use a
// spectral momentum operator.

#include <cstdint>
#include <vector>

#include "cvl/cval.hpp"
#include "cvl/uncertainty.hpp"

namespace cvl {

// Points q_j = q_min + j dq, j = 0..points-1, endpoints included.
struct Grid {
  double q_min = -10.0;
  double q_max = 10.0;
  Index points = 4096;

  double dq() const { return (q_max - q_min) / static_cast<double>(points - 1); }
  double q(Index j) const { return q_min + static_cast<double>(j) * dq(); }
  void validate() const;
};

enum class Stencil { second, fourth };

namespace tol {
inline constexpr double kGrid = 1e-6;
// Pointwise c-values are masked where rho < kRhoCutoff * max rho.
inline constexpr double kRhoCutoff = 1e-10;
// Boundary density relative to the peak.
inline constexpr double kBoundary = 1e-12;
}  // namespace tol

class GridWavefunction {
 public:
  // Normalizes so that sum_j rho_j dq = 1. Throws InvariantViolation when
  // the boundary density exceeds tol::kBoundary of the peak.
  GridWavefunction(Grid grid, CVector amplitudes, double hbar = 1.0);

  const Grid& grid() const { return grid_; }
  const CVector& amplitudes() const { return psi_; }
  const RVector& rho() const { return rho_; }
  const RVector& action() const { return s_; }  // hbar * unwrapped phase
  double hbar() const { return hbar_; }
  double max_rho() const { return max_rho_; }
  double norm() const;  // sum rho dq

 private:
  Grid grid_;
  CVector psi_;
  RVector rho_;
  RVector s_;
  double hbar_;
  double max_rho_;
};

struct GaussianSpec {
  double sigma = 1.0;
  double q0 = 0.0;
  double p0 = 0.0;
  double chirp = 0.0;  // S gains chirp * (q - q0)^2 / 2
};

// Requires >= 32 points per sigma and >= 8 sigma of grid on each side of q0;
// throws InvalidArgument otherwise.
GridWavefunction build_gaussian(const GaussianSpec& spec, const Grid& grid, double hbar = 1.0);

// Flat-topped amplitude (tanh(q - a)/w - tanh(q - b)/w) / 2 times exp(i p0 q / hbar).
struct PlateauEnvelope {
  double a = -60.0;
  double b = 60.0;
  double width = 1.0;

  // Interior where rho is flat to double precision headroom.
  double interior_min() const { return a + 10.0 * width; }
  double interior_max() const { return b - 10.0 * width; }
};

// Requires >= 16 points per width and >= 14 widths between each edge and the
// grid boundary.
GridWavefunction build_plane_wave(double p0, const PlateauEnvelope& envelope, const Grid& grid,
                                  double hbar = 1.0);

// value(j, xi) = estimate[j] + (xi/hbar) error_coefficient[j]
struct GridCVal {
  RVector estimate;
  RVector error_coefficient;
  std::vector<bool> valid;
  double hbar = 1.0;
  double masked_probability = 0.0;  // sum rho dq over invalid points

  Index size() const { return estimate.size(); }
  bool is_valid(Index j) const { return valid[static_cast<std::size_t>(j)]; }
  // Throws MaskedEntry on an invalid point.
  double value(Index j, double xi) const;
};

GridCVal momentum_field(const GridWavefunction& wf, Stencil stencil = Stencil::fourth);
GridCVal hamiltonian_free_field(const GridWavefunction& wf, double mass,
                                Stencil stencil = Stencil::fourth);

double cval_momentum(const GridWavefunction& wf, Index j, double xi,
                     Stencil stencil = Stencil::fourth);
double cval_hamiltonian_free(const GridWavefunction& wf, Index j, double xi, double mass,
                             Stencil stencil = Stencil::fourth);

// Closed-form H~ for the real Gaussian of width sigma centred at 0.
double gaussian_hamiltonian_exact(double q, double sigma, double mass, double hbar);

struct AverageEquality {
  double h_cval = 0.0;         // <H~>
  double kinetic_spectral = 0.0;  // <psi|p^2/2m|psi> via FFT
  double p_cval_sq = 0.0;      // <p~^2/2m>
  double masked_probability = 0.0;
};

AverageEquality average_equality_check(const GridWavefunction& wf, double mass,
                                       const XiModel& model, Stencil stencil = Stencil::fourth);

// <psi|p|psi> and <psi|p^2|psi> and Re<psi|q p|psi> with p applied spectrally.
struct SpectralMoments {
  double p = 0.0;
  double p2 = 0.0;
  double sym_qp = 0.0;  // (1/2)<{q, p}>
};
SpectralMoments spectral_moments(const GridWavefunction& wf);

// <p~> over the grid-xi ensemble.
double mean_cval_momentum(const GridWavefunction& wf, const XiModel& model,
                          Stencil stencil = Stencil::fourth);

// Pointwise |1/4 (rho'/rho)^2 + (sqrt rho)''/sqrt rho - 1/2 rho''/rho|,
// relative to the sum of the three magnitudes; 0 at masked points.
std::vector<double> rho_identity_residuals(const GridWavefunction& wf,
                                           Stencil stencil = Stencil::fourth);

// sigma^2_q sigma^2_p~ against |(1/2)<{q,p}> - <q><p>|^2 + hbar^2/4.
BoundReport position_momentum_krs(const GridWavefunction& wf, const XiModel& model,
                                  Stencil stencil = Stencil::fourth);

// Grid positions where the xi-free part of H~ changes sign, linearly
// interpolated between neighbouring valid points.
std::vector<double> hamiltonian_sign_changes(const GridCVal& h, const Grid& grid);

}  // namespace cvl
