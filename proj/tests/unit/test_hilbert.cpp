#include <doctest.h>

#include "cvl/hilbert.hpp"
#include "cvl/random.hpp"
#include "support/oracles.hpp"

using namespace cvl;

TEST_CASE("state vectors enforce normalization and dimension") {
  CVector v(2);
  v << 1.0, 1.0;
  CHECK_THROWS_AS(StateVector{v}, InvariantViolation);
  CHECK_NOTHROW(StateVector::normalized(v));
  CVector one(1);
  one << 1.0;
  CHECK_THROWS_AS(StateVector{one}, InvariantViolation);
  CHECK_THROWS_AS(StateVector::normalized(CVector::Zero(3)), InvariantViolation);
}

TEST_CASE("born probabilities") {
  const auto comp = OrthonormalBasis::computational(2);
  SUBCASE("basis vector gives unit mass") {
    const RVector p = born_probabilities(comp, StateVector::basis_state(2, 1));
    CHECK(p[0] == doctest::Approx(0.0));
    CHECK(p[1] == doctest::Approx(1.0));
  }
  SUBCASE("plus state is balanced") {
    const RVector p = born_probabilities(comp, presets::plus());
    CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-14));
  }
  SUBCASE("random d=5 instance sums to one") {
    oracle::Gen g(7);
    const OrthonormalBasis b(g.unitary(5));
    const RVector p = born_probabilities(b, StateVector(g.state(5)));
    CHECK(p.minCoeff() >= 0.0);
    CHECK(std::abs(p.sum() - 1.0) <= 1e-10);
  }
  CHECK_THROWS_AS(born_probabilities(comp, StateVector::basis_state(3, 0)), DimensionMismatch);
}

TEST_CASE("expectation values") {
  CHECK(std::abs(expectation(OperatorMatrix::identity(3), StateVector::basis_state(3, 2)) - 1.0) < 1e-15);
  CHECK(std::abs(expectation(presets::sigma_z(), StateVector::basis_state(2, 0)) - 1.0) < 1e-15);
  CHECK(std::abs(expectation(presets::sigma_x(), StateVector::basis_state(2, 0))) < 1e-15);

  oracle::Gen g(11);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Index d = 2 + i % 7;
    const OperatorMatrix h(g.hermitian(d), true);
    worst = std::max(worst, std::abs(expectation(h, StateVector(g.state(d))).imag()));
  }
  CHECK(worst <= tol::kHerm);
}

TEST_CASE("bracket conventions") {
  const OperatorMatrix sx = presets::sigma_x(), sy = presets::sigma_y(), sz = presets::sigma_z();
  CHECK(commutator(sx, sx).matrix().cwiseAbs().maxCoeff() == 0.0);
  CHECK((commutator(sx, sy).matrix() - cplx(0, 2) * sz.matrix()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(anticommutator(sx, sy).matrix().cwiseAbs().maxCoeff() < 1e-15);

  // For non-Hermitian arguments the second product carries the adjoints.
  oracle::Gen g(3);
  const CMatrix a = g.general(3), b = g.general(3);
  CHECK((commutator(a, b) - (a * b - b.adjoint() * a.adjoint())).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((anticommutator(a, b) - (a * b + b.adjoint() * a.adjoint())).cwiseAbs().maxCoeff() < 1e-14);
  CHECK_THROWS_AS(commutator(OperatorMatrix::identity(2), OperatorMatrix::identity(3)), DimensionMismatch);
}

TEST_CASE("operator hermiticity hint is validated") {
  oracle::Gen g(5);
  CHECK_THROWS_AS(OperatorMatrix(g.general(3), true), NotHermitian);
  CHECK(OperatorMatrix::hermitian_part(g.general(3)).hermitian());
}

TEST_CASE("eigenbasis") {
  SUBCASE("sigma_z") {
    const Eigensystem es = eigenbasis(presets::sigma_z());
    CHECK(es.eigenvalues[0] == doctest::Approx(-1.0));
    CHECK(es.eigenvalues[1] == doctest::Approx(1.0));
    CHECK(std::abs(std::abs(es.basis.columns()(1, 0)) - 1.0) < 1e-14);
    CHECK(std::abs(std::abs(es.basis.columns()(0, 1)) - 1.0) < 1e-14);
  }
  SUBCASE("identity is degenerate and reproducible") {
    const Eigensystem a = eigenbasis(OperatorMatrix::identity(4));
    const Eigensystem b = eigenbasis(OperatorMatrix::identity(4));
    CHECK((a.eigenvalues.array() - 1.0).abs().maxCoeff() < 1e-14);
    CHECK((a.basis.columns() - b.basis.columns()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(completeness_defect(a.basis) <= tol::kOrtho);
  }
  SUBCASE("degenerate cluster inside a larger spectrum") {
    const OperatorMatrix s = presets::spin1_z() * presets::spin1_z();
    const Eigensystem es = eigenbasis(s);
    CHECK(es.eigenvalues[1] == doctest::Approx(1.0));
    CHECK(es.eigenvalues[2] == doctest::Approx(1.0));
    CHECK(completeness_defect(es.basis) <= tol::kOrtho);
  }
  SUBCASE("random Hermitian round trip, d = 2..8") {
    oracle::Gen g(21);
    for (Index d = 2; d <= 8; ++d) {
      for (int rep = 0; rep < 20; ++rep) {
        const OperatorMatrix h(g.hermitian(d), true);
        const Eigensystem es = eigenbasis(h);
        CMatrix rebuilt = CMatrix::Zero(d, d);
        for (Index n = 0; n < d; ++n) rebuilt += es.eigenvalues[n] * es.basis.projector(n);
        CHECK((rebuilt - h.matrix()).cwiseAbs().maxCoeff() <= tol::kEig);
        for (Index n = 1; n < d; ++n) CHECK(es.eigenvalues[n] >= es.eigenvalues[n - 1]);
        CHECK(completeness_defect(es.basis) <= tol::kOrtho);
      }
    }
  }
  oracle::Gen g(1);
  CHECK_THROWS_AS(eigenbasis(OperatorMatrix(g.general(3))), NotHermitian);
}

TEST_CASE("density matrices") {
  const auto zero = StateVector::basis_state(2, 0), one = StateVector::basis_state(2, 1);
  const OperatorMatrix pure = density_matrix(MixedEnsemble({1.0}, {presets::plus()}));
  CHECK((pure.matrix() * pure.matrix() - pure.matrix()).cwiseAbs().maxCoeff() < 1e-14);
  const OperatorMatrix zz = density_matrix(MixedEnsemble({0.5, 0.5}, {zero, one}));
  const OperatorMatrix xx = density_matrix(MixedEnsemble({0.5, 0.5}, {presets::plus(), presets::minus()}));
  CHECK((zz.matrix() - 0.5 * CMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((zz.matrix() - xx.matrix()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK_THROWS_AS(MixedEnsemble({0.7, 0.7}, {zero, one}), InvariantViolation);
}

TEST_CASE("bases validate orthonormality") {
  CMatrix bad = CMatrix::Identity(2, 2);
  bad(0, 1) = 0.1;
  CHECK_THROWS_AS(OrthonormalBasis{bad}, InvariantViolation);
  const auto t = OrthonormalBasis::computational(2).tensor(OrthonormalBasis::computational(3));
  CHECK(t.dim() == 6);
  CHECK(completeness_defect(t) <= tol::kOrtho);
}

TEST_CASE("unitary flow") {
  // exp(-i sigma_x pi/2) |0> = -i |1>
  const UnitaryFlow flow(presets::sigma_x(), 1.0);
  const StateVector out = flow.apply(StateVector::basis_state(2, 0), M_PI / 2.0);
  CHECK(std::abs(out[1] - cplx(0, -1)) < 1e-14);
  CHECK(std::abs(out[0]) < 1e-14);
}

TEST_CASE("library Haar generators produce valid objects") {
  Rng rng(4);
  for (Index d = 2; d <= 6; ++d) {
    CHECK(completeness_defect(haar_basis(rng, d)) <= tol::kOrtho);
    const OperatorMatrix h = random_hermitian(rng, d);
    CHECK(h.is_numerically_hermitian());
  }
  Rng a(99), b(99);
  CHECK(haar_state(a, 4).id() == haar_state(b, 4).id());
}
