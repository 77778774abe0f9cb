#include "cvl/hilbert.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <string>

namespace cvl {

namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

void fnv_mix(std::uint64_t& h, const void* data, std::size_t len) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= bytes[i];
    h *= kFnvPrime;
  }
}

void fnv_mix_values(std::uint64_t& h, const cplx* data, Index count) {
  for (Index i = 0; i < count; ++i) {
    // +0.0 and -0.0 hash alike.
    double re = data[i].real() + 0.0;
    double im = data[i].imag() + 0.0;
    fnv_mix(h, &re, sizeof re);
    fnv_mix(h, &im, sizeof im);
  }
}

double max_abs(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

void require_same_dim(Index a, Index b, const char* what) {
  if (a != b) {
    throw DimensionMismatch(std::string(what) + ": dimension " + std::to_string(a) +
                            " vs " + std::to_string(b));
  }
}

// Makes the first component with magnitude above the cutoff real positive.
void fix_phase(Eigen::Ref<CVector> v) {
  const double cutoff = 1e-8 * v.cwiseAbs().maxCoeff();
  for (Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > cutoff) {
      v *= std::conj(v[i]) / std::abs(v[i]);
      return;
    }
  }
}

}  // namespace

std::uint64_t content_hash(const CVector& v) {
  std::uint64_t h = kFnvOffset;
  const auto n = static_cast<std::int64_t>(v.size());
  fnv_mix(h, &n, sizeof n);
  fnv_mix_values(h, v.data(), v.size());
  return h;
}

std::uint64_t content_hash(const CMatrix& m) {
  std::uint64_t h = kFnvOffset;
  const std::int64_t shape[2] = {static_cast<std::int64_t>(m.rows()),
                                 static_cast<std::int64_t>(m.cols())};
  fnv_mix(h, shape, sizeof shape);
  fnv_mix_values(h, m.data(), m.size());
  return h;
}

// ---------------------------------------------------------------------------
// StateVector

StateVector::StateVector(CVector amplitudes) : amps_(std::move(amplitudes)) {
  if (amps_.size() < 2) {
    throw InvariantViolation("state vector needs dimension >= 2");
  }
  if (!amps_.allFinite()) {
    throw InvariantViolation("state vector has non-finite amplitudes");
  }
  const double norm = amps_.norm();
  if (std::abs(norm - 1.0) > tol::kNorm) {
    throw InvariantViolation("state vector not normalized: norm = " + std::to_string(norm));
  }
  id_ = content_hash(amps_);
}

StateVector StateVector::normalized(CVector amplitudes) {
  const double norm = amplitudes.norm();
  if (!(norm > 1e-300) || !std::isfinite(norm)) {
    throw InvariantViolation("cannot normalize a zero or non-finite vector");
  }
  return StateVector(amplitudes / norm);
}

StateVector StateVector::basis_state(Index dim, Index k) {
  if (k < 0 || k >= dim) {
    throw InvalidArgument("basis index out of range");
  }
  CVector v = CVector::Zero(dim);
  v[k] = 1.0;
  return StateVector(std::move(v));
}

cplx StateVector::inner(const StateVector& other) const {
  require_same_dim(dim(), other.dim(), "inner product");
  return amps_.dot(other.amps_);  // Eigen's dot conjugates the first argument
}

StateVector StateVector::with_phase(double phase) const {
  return StateVector(amps_ * std::polar(1.0, phase));
}

// ---------------------------------------------------------------------------
// OperatorMatrix

OperatorMatrix::OperatorMatrix(CMatrix entries, bool hermitian_hint)
    : m_(std::move(entries)), hermitian_(hermitian_hint) {
  if (m_.rows() != m_.cols()) {
    throw DimensionMismatch("operator matrix must be square");
  }
  if (m_.rows() < 1) {
    throw InvariantViolation("operator matrix is empty");
  }
  if (!m_.allFinite()) {
    throw InvariantViolation("operator matrix has non-finite entries");
  }
  if (hermitian_ && !is_numerically_hermitian()) {
    throw NotHermitian("operator flagged Hermitian is not: max|M - M^dagger| = " +
                       std::to_string(max_abs(m_ - m_.adjoint())));
  }
}

OperatorMatrix OperatorMatrix::identity(Index dim) {
  return OperatorMatrix(CMatrix::Identity(dim, dim), true);
}

OperatorMatrix OperatorMatrix::hermitian_part(const CMatrix& m) {
  CMatrix h = 0.5 * (m + m.adjoint());
  return OperatorMatrix(std::move(h), true);
}

bool OperatorMatrix::is_numerically_hermitian(double tolerance) const {
  const double scale = std::max(1.0, max_abs(m_));
  return max_abs(m_ - m_.adjoint()) <= tolerance * scale;
}

OperatorMatrix OperatorMatrix::adjoint() const {
  return OperatorMatrix(m_.adjoint(), hermitian_);
}

OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_dim(a.dim(), b.dim(), "operator sum");
  return OperatorMatrix(a.m_ + b.m_, a.hermitian_ && b.hermitian_);
}

OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_dim(a.dim(), b.dim(), "operator difference");
  return OperatorMatrix(a.m_ - b.m_, a.hermitian_ && b.hermitian_);
}

OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_dim(a.dim(), b.dim(), "operator product");
  return OperatorMatrix(a.m_ * b.m_);
}

OperatorMatrix operator*(cplx s, const OperatorMatrix& a) {
  const bool herm = a.hermitian_ && s.imag() == 0.0;
  return OperatorMatrix(s * a.m_, herm);
}

// ---------------------------------------------------------------------------
// OrthonormalBasis

OrthonormalBasis::OrthonormalBasis(CMatrix columns) : cols_(std::move(columns)) {
  if (cols_.rows() != cols_.cols()) {
    throw DimensionMismatch("a complete basis needs exactly dim vectors");
  }
  if (cols_.rows() < 2) {
    throw InvariantViolation("basis needs dimension >= 2");
  }
  const Index d = cols_.rows();
  const CMatrix eye = CMatrix::Identity(d, d);
  const double gram = max_abs(cols_.adjoint() * cols_ - eye);
  const double resolution = max_abs(cols_ * cols_.adjoint() - eye);
  if (gram > tol::kOrtho || resolution > tol::kOrtho) {
    throw InvariantViolation("basis not orthonormal/complete: gram defect " +
                             std::to_string(gram) + ", resolution defect " +
                             std::to_string(resolution));
  }
  id_ = content_hash(cols_);
}

namespace {
CMatrix stack_columns(const std::vector<StateVector>& vectors) {
  if (vectors.empty()) {
    throw InvariantViolation("empty basis");
  }
  const Index d = vectors.front().dim();
  CMatrix cols(d, static_cast<Index>(vectors.size()));
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    require_same_dim(d, vectors[i].dim(), "basis vector");
    cols.col(static_cast<Index>(i)) = vectors[i].amplitudes();
  }
  return cols;
}
}  // namespace

OrthonormalBasis::OrthonormalBasis(const std::vector<StateVector>& vectors)
    : OrthonormalBasis(stack_columns(vectors)) {}

OrthonormalBasis OrthonormalBasis::computational(Index dim) {
  return OrthonormalBasis(CMatrix::Identity(dim, dim));
}

StateVector OrthonormalBasis::vector(Index n) const {
  return StateVector::normalized(cols_.col(n));
}

CMatrix OrthonormalBasis::projector(Index n) const {
  return cols_.col(n) * cols_.col(n).adjoint();
}

OrthonormalBasis OrthonormalBasis::tensor(const OrthonormalBasis& other) const {
  return OrthonormalBasis(CMatrix(Eigen::kroneckerProduct(cols_, other.cols_)));
}

// ---------------------------------------------------------------------------

void PlanckConfig::validate() const {
  if (!(hbar > 0.0) || !std::isfinite(hbar)) {
    throw InvalidArgument("hbar must be positive and finite");
  }
}

MixedEnsemble::MixedEnsemble(std::vector<double> weights, std::vector<StateVector> states)
    : weights_(std::move(weights)), states_(std::move(states)) {
  if (states_.empty() || weights_.size() != states_.size()) {
    throw InvariantViolation("ensemble needs one weight per state and at least one state");
  }
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw InvariantViolation("ensemble weights must be nonnegative");
    }
    total += w;
  }
  if (std::abs(total - 1.0) > tol::kNorm) {
    throw InvariantViolation("ensemble weights must sum to 1");
  }
  for (const auto& s : states_) {
    require_same_dim(states_.front().dim(), s.dim(), "ensemble state");
  }
}

RVector born_probabilities(const OrthonormalBasis& basis, const StateVector& psi) {
  require_same_dim(basis.dim(), psi.dim(), "born_probabilities");
  const CVector overlaps = basis.columns().adjoint() * psi.amplitudes();
  return overlaps.cwiseAbs2();
}

cplx expectation(const CMatrix& op, const StateVector& psi) {
  require_same_dim(op.rows(), psi.dim(), "expectation");
  return psi.amplitudes().dot(op * psi.amplitudes());
}

cplx expectation(const OperatorMatrix& op, const StateVector& psi) {
  return expectation(op.matrix(), psi);
}

CMatrix commutator(const CMatrix& a, const CMatrix& b) {
  require_same_dim(a.rows(), b.rows(), "commutator");
  return a * b - b.adjoint() * a.adjoint();
}

CMatrix anticommutator(const CMatrix& a, const CMatrix& b) {
  require_same_dim(a.rows(), b.rows(), "anticommutator");
  return a * b + b.adjoint() * a.adjoint();
}

OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b) {
  return OperatorMatrix(commutator(a.matrix(), b.matrix()));
}

OperatorMatrix anticommutator(const OperatorMatrix& a, const OperatorMatrix& b) {
  return OperatorMatrix(anticommutator(a.matrix(), b.matrix()));
}

Eigensystem eigenbasis(const OperatorMatrix& op) {
  if (!op.hermitian() && !op.is_numerically_hermitian()) {
    throw NotHermitian("eigenbasis requires a Hermitian operator");
  }
  const CMatrix h = 0.5 * (op.matrix() + op.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
  if (solver.info() != Eigen::Success) {
    throw Error("eigen decomposition failed");
  }
  const RVector& values = solver.eigenvalues();
  CMatrix vectors = solver.eigenvectors();
  const Index d = h.rows();
  const double gap = tol::kDegenerateGap * std::max(1.0, values.cwiseAbs().maxCoeff());

  Index start = 0;
  while (start < d) {
    Index stop = start + 1;
    while (stop < d && values[stop] - values[stop - 1] < gap) {
      ++stop;
    }
    const Index k = stop - start;
    if (k > 1) {
      // Rebuild the cluster from projected computational vectors, greedily
      // taking the largest residual (lowest index on ties).
      const CMatrix block = vectors.middleCols(start, k);
      const CMatrix proj = block * block.adjoint();
      CMatrix chosen(d, k);
      std::vector<bool> used(static_cast<std::size_t>(d), false);
      for (Index c = 0; c < k; ++c) {
        Index best = -1;
        double best_norm = -1.0;
        CVector best_vec;
        for (Index j = 0; j < d; ++j) {
          if (used[static_cast<std::size_t>(j)]) continue;
          CVector v = proj.col(j);
          for (Index p = 0; p < c; ++p) {
            v -= chosen.col(p) * chosen.col(p).dot(v);
          }
          const double nv = v.norm();
          if (nv > best_norm * (1.0 + 1e-12)) {
            best_norm = nv;
            best = j;
            best_vec = std::move(v);
          }
        }
        used[static_cast<std::size_t>(best)] = true;
        chosen.col(c) = best_vec / best_norm;
      }
      vectors.middleCols(start, k) = chosen;
    }
    start = stop;
  }
  for (Index j = 0; j < d; ++j) {
    fix_phase(vectors.col(j));
  }
  return Eigensystem{OrthonormalBasis(std::move(vectors)), values};
}

OperatorMatrix density_matrix(const MixedEnsemble& ens) {
  const Index d = ens.dim();
  CMatrix rho = CMatrix::Zero(d, d);
  for (std::size_t mu = 0; mu < ens.size(); ++mu) {
    const CVector& v = ens.states()[mu].amplitudes();
    rho += ens.weights()[mu] * (v * v.adjoint());
  }
  rho = 0.5 * (rho + rho.adjoint());
  return OperatorMatrix(std::move(rho), true);
}

double completeness_defect(const OrthonormalBasis& basis) {
  const Index d = basis.dim();
  CMatrix sum = CMatrix::Zero(d, d);
  for (Index n = 0; n < basis.size(); ++n) {
    sum += basis.projector(n);
  }
  return max_abs(sum - CMatrix::Identity(d, d));
}

UnitaryFlow::UnitaryFlow(const OperatorMatrix& generator, double hbar) : hbar_(hbar) {
  PlanckConfig{hbar}.validate();
  Eigensystem es = eigenbasis(generator);
  vectors_ = es.basis.columns();
  values_ = std::move(es.eigenvalues);
}

StateVector UnitaryFlow::apply(const StateVector& psi, double theta) const {
  require_same_dim(vectors_.rows(), psi.dim(), "unitary flow");
  CVector coeffs = vectors_.adjoint() * psi.amplitudes();
  for (Index i = 0; i < coeffs.size(); ++i) {
    coeffs[i] *= std::polar(1.0, -values_[i] * theta / hbar_);
  }
  return StateVector::normalized(vectors_ * coeffs);
}

namespace presets {

namespace {
const cplx kI{0.0, 1.0};
}

OperatorMatrix sigma_x() {
  CMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return OperatorMatrix(m, true);
}

OperatorMatrix sigma_y() {
  CMatrix m(2, 2);
  m << 0, -kI, kI, 0;
  return OperatorMatrix(m, true);
}

OperatorMatrix sigma_z() {
  CMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return OperatorMatrix(m, true);
}

OperatorMatrix spin1_x() {
  const double s = 1.0 / std::sqrt(2.0);
  CMatrix m(3, 3);
  m << 0, s, 0, s, 0, s, 0, s, 0;
  return OperatorMatrix(m, true);
}

OperatorMatrix spin1_y() {
  const double s = 1.0 / std::sqrt(2.0);
  CMatrix m(3, 3);
  m << 0, -kI * s, 0, kI * s, 0, -kI * s, 0, kI * s, 0;
  return OperatorMatrix(m, true);
}

OperatorMatrix spin1_z() {
  CMatrix m = CMatrix::Zero(3, 3);
  m(0, 0) = 1;
  m(2, 2) = -1;
  return OperatorMatrix(m, true);
}

OperatorMatrix kron(const OperatorMatrix& a, const OperatorMatrix& b) {
  return OperatorMatrix(CMatrix(Eigen::kroneckerProduct(a.matrix(), b.matrix())),
                        a.hermitian() && b.hermitian());
}

StateVector kron(const StateVector& a, const StateVector& b) {
  CVector v(a.dim() * b.dim());
  for (Index i = 0; i < a.dim(); ++i) {
    v.segment(i * b.dim(), b.dim()) = a[i] * b.amplitudes();
  }
  return StateVector::normalized(std::move(v));
}

StateVector plus() {
  return StateVector::normalized(CVector::Ones(2));
}

StateVector minus() {
  CVector v(2);
  v << 1, -1;
  return StateVector::normalized(std::move(v));
}

StateVector plus_i() {
  CVector v(2);
  v << 1, kI;
  return StateVector::normalized(std::move(v));
}

StateVector bell_phi_plus() {
  CVector v = CVector::Zero(4);
  v[0] = 1;
  v[3] = 1;
  return StateVector::normalized(std::move(v));
}

}  // namespace presets

}  // namespace cvl
