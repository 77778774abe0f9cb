#pragma once

// Finite-dimensional Hilbert-space primitives: pure states, operators,
// orthonormal bases, mixed ensembles, and the handful of algebraic
// operations every other module is built from.
//
// Inner products are conjugate-linear in the first slot: <a|b> = a^dagger b.

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cvl/errors.hpp"

namespace cvl {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

namespace tol {
inline constexpr double kNorm = 1e-10;
inline constexpr double kOrtho = 1e-10;
inline constexpr double kHerm = 1e-10;
inline constexpr double kEig = 1e-9;  // relative to the matrix norm
inline constexpr double kIdentity = 1e-10;
// Eigenvalues closer than this are treated as one degenerate cluster.
inline constexpr double kDegenerateGap = 1e-8;
}  // namespace tol

// Stable 64-bit content hash used as a provenance handle.
std::uint64_t content_hash(const CVector& v);
std::uint64_t content_hash(const CMatrix& m);

class StateVector {
 public:
  // Throws InvariantViolation unless ||amplitudes|| = 1 within tol::kNorm
  // and dim >= 2.
  explicit StateVector(CVector amplitudes);

  // Normalizes first; throws if the input is (numerically) zero.
  static StateVector normalized(CVector amplitudes);
  static StateVector basis_state(Index dim, Index k);

  const CVector& amplitudes() const { return amps_; }
  Index dim() const { return amps_.size(); }
  cplx operator[](Index i) const { return amps_[i]; }
  std::uint64_t id() const { return id_; }

  // <this|other>
  cplx inner(const StateVector& other) const;
  StateVector with_phase(double phase) const;

 private:
  CVector amps_;
  std::uint64_t id_ = 0;
};

class OperatorMatrix {
 public:
  // With hermitian_hint the matrix must satisfy max|M - M^dagger| <= tol::kHerm
  // (scaled by max(1, max|M|)); violation throws NotHermitian.
  explicit OperatorMatrix(CMatrix entries, bool hermitian_hint = false);

  static OperatorMatrix identity(Index dim);
  // Symmetrizes (M + M^dagger)/2 and sets the hint.
  static OperatorMatrix hermitian_part(const CMatrix& m);

  const CMatrix& matrix() const { return m_; }
  Index dim() const { return m_.rows(); }
  bool hermitian() const { return hermitian_; }
  // True when the entries are Hermitian regardless of the hint.
  bool is_numerically_hermitian(double tolerance = tol::kHerm) const;

  OperatorMatrix adjoint() const;
  std::uint64_t id() const { return content_hash(m_); }

  friend OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b);
  friend OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b);
  friend OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b);
  friend OperatorMatrix operator*(cplx s, const OperatorMatrix& a);

 private:
  CMatrix m_;
  bool hermitian_ = false;
};

class OrthonormalBasis {
 public:
  // Columns are the basis vectors. Throws InvariantViolation unless the Gram
  // matrix and the resolution of identity both match 1 within tol::kOrtho.
  explicit OrthonormalBasis(CMatrix columns);
  explicit OrthonormalBasis(const std::vector<StateVector>& vectors);

  static OrthonormalBasis computational(Index dim);

  Index dim() const { return cols_.rows(); }
  Index size() const { return cols_.cols(); }
  const CMatrix& columns() const { return cols_; }
  StateVector vector(Index n) const;
  // |phi_n><phi_n|
  CMatrix projector(Index n) const;
  std::uint64_t id() const { return id_; }

  // Kronecker product basis: index n = i * other.size() + j.
  OrthonormalBasis tensor(const OrthonormalBasis& other) const;

 private:
  CMatrix cols_;
  std::uint64_t id_ = 0;
};

struct PlanckConfig {
  double hbar = 1.0;
  // Throws InvalidArgument unless hbar > 0 and finite.
  void validate() const;
};

class MixedEnsemble {
 public:
  MixedEnsemble(std::vector<double> weights, std::vector<StateVector> states);

  const std::vector<double>& weights() const { return weights_; }
  const std::vector<StateVector>& states() const { return states_; }
  std::size_t size() const { return states_.size(); }
  Index dim() const { return states_.front().dim(); }

 private:
  std::vector<double> weights_;
  std::vector<StateVector> states_;
};

// |<phi_n|psi>|^2 for every basis vector.
RVector born_probabilities(const OrthonormalBasis& basis, const StateVector& psi);

// <psi|O|psi>
cplx expectation(const OperatorMatrix& op, const StateVector& psi);
cplx expectation(const CMatrix& op, const StateVector& psi);

// Bracket conventions with the adjoint on the second product:
//   commutator(A, B)     = AB - B^dagger A^dagger
//   anticommutator(A, B) = AB + B^dagger A^dagger
// Both reduce to the usual brackets for Hermitian arguments.
OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix anticommutator(const OperatorMatrix& a, const OperatorMatrix& b);
CMatrix commutator(const CMatrix& a, const CMatrix& b);
CMatrix anticommutator(const CMatrix& a, const CMatrix& b);

struct Eigensystem {
  OrthonormalBasis basis;
  RVector eigenvalues;  // ascending, aligned with basis columns
};

// Requires a Hermitian operator (hint set or numerically Hermitian); throws
// NotHermitian otherwise. Degenerate clusters are re-orthonormalized from the
// computational basis, and every vector's first significant component is made
// real positive, so the result is reproducible.
Eigensystem eigenbasis(const OperatorMatrix& op);

// sum_mu Pr(mu) |psi_mu><psi_mu|
OperatorMatrix density_matrix(const MixedEnsemble& ens);

// Max-norm of (sum_n Pi_n - 1).
double completeness_defect(const OrthonormalBasis& basis);

// psi -> exp(-i A theta / hbar) psi, with the spectral decomposition of the
// Hermitian generator A computed once.
class UnitaryFlow {
 public:
  UnitaryFlow(const OperatorMatrix& generator, double hbar);
  StateVector apply(const StateVector& psi, double theta) const;

 private:
  CMatrix vectors_;
  RVector values_;
  double hbar_;
};

// Named presets.
namespace presets {
OperatorMatrix sigma_x();
OperatorMatrix sigma_y();
OperatorMatrix sigma_z();
// Spin-1 angular momentum components (hbar = 1), basis m = +1, 0, -1.
OperatorMatrix spin1_x();
OperatorMatrix spin1_y();
OperatorMatrix spin1_z();
OperatorMatrix kron(const OperatorMatrix& a, const OperatorMatrix& b);
StateVector kron(const StateVector& a, const StateVector& b);
StateVector plus();
StateVector minus();
StateVector plus_i();
// (|00> + |11>)/sqrt(2)
StateVector bell_phi_plus();
}  // namespace presets

}  // namespace cvl
