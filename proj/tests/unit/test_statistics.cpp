#include <doctest.h>

#include "cvl/statistics.hpp"
#include "support/oracles.hpp"

using namespace cvl;

namespace {

struct Instance {
  oracle::Mat a, b, u;
  oracle::Vec psi;
  OrthonormalBasis basis;
  StateVector state;
};

Instance make(oracle::Gen& g, Index d, bool hermitian) {
  const oracle::Mat u = g.unitary(d);
  const oracle::Vec psi = g.state_avoiding(d, {u});
  oracle::Mat a = hermitian ? g.hermitian(d) : g.general(d);
  oracle::Mat b = hermitian ? g.hermitian(d) : g.general(d);
  return {a, b, u, psi, OrthonormalBasis(u), StateVector(psi)};
}

CValField field(const oracle::Mat& m, const Instance& in, const XiModel& model, bool herm) {
  return build_cval(OperatorMatrix(m, herm), in.state, in.basis, model);
}

}  // namespace

TEST_CASE("first moments: spin example") {
  // |+> in the computational basis, O = sigma_y: weak values are -i and +i.
  const auto basis = OrthonormalBasis::computational(2);
  const XiModel model = XiModel::binary();
  const CValField f = build_cval(presets::sigma_y(), presets::plus(), basis, model);
  CHECK(std::abs(mean_cval(f, presets::plus(), basis, model).real()) < 1e-15);
  CHECK(std::abs(xi_weighted_mean(f, presets::plus(), basis, model).real()) < 1e-15);
  CHECK(std::abs(f.im_part[0] + 1.0) < 1e-15);
}

TEST_CASE("averages reproduce quantum expectation values across routes") {
  oracle::Gen g(101);
  double worst = 0.0;
  for (int i = 0; i < 300; ++i) {
    const Index d = 2 + i % 7;
    const bool herm = i % 3 == 0;
    const Instance in = make(g, d, herm);
    for (XiKind k : {XiKind::binary, XiKind::uniform, XiKind::gaussian}) {
      const XiModel model = XiModel::of_kind(k, 1.0 + 0.1 * (i % 4));
      const CValField fa = field(in.a, in, model, herm), fb = field(in.b, in, model, herm);
      const oracle::Mat ad = in.a.adjoint(), bd = in.b.adjoint();
      const cplx ea = oracle::expect(in.a, in.psi);
      const cplx prod = oracle::expect(0.5 * (ad * in.b + bd * in.a), in.psi);
      const cplx comm = oracle::expect(ad * in.b - bd * in.a, in.psi) / cplx(0, 2);
      const cplx full = oracle::expect(ad * in.b, in.psi);

      worst = std::max(worst, std::abs(mean_cval(fa, in.state, in.basis, model).real() - ea.real()));
      worst = std::max(worst, std::abs(xi_weighted_mean(fa, in.state, in.basis, model).real() - ea.imag()));
      worst = std::max(worst, std::abs(complex_expectation(fa, in.state, in.basis, model).value - ea));
      worst = std::max(worst, std::abs(product_average(fa, fb, in.state, in.basis, model).value - prod));
      worst = std::max(worst, std::abs(commutator_average(fa, fb, in.state, in.basis, model).value - comm));
      worst = std::max(worst, std::abs(full_product_representation(fa, fb, in.state, in.basis, model).value - full));
      if (k == XiKind::binary) {
        const AverageOptions en{AverageMethod::enumerated};
        worst = std::max(worst, std::abs(product_average(fa, fb, in.state, in.basis, model, en).value - prod));
        worst = std::max(worst, std::abs(full_product_representation(fa, fb, in.state, in.basis, model, en).value - full));
      }
    }
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("brute-force binary oracle agrees with the product integrand") {
  oracle::Gen g(7);
  const Instance in = make(g, 4, false);
  const XiModel model = XiModel::binary();
  const CValField fa = field(in.a, in, model, false), fb = field(in.b, in, model, false);
  const cplx brute = oracle::binary_average({in.a, in.b}, in.psi, in.u, [](const std::vector<cplx>& w, double t) {
    return cplx((w[0].real() + t * w[0].imag()) * (w[1].real() + t * w[1].imag()), 0.0);
  });
  CHECK(std::abs(product_average(fa, fb, in.state, in.basis, model).value - brute) < 1e-12);
}

TEST_CASE("commutator average needs a symmetric xi") {
  oracle::Gen g(3);
  const Instance in = make(g, 3, false);
  const XiModel skew = XiModel::custom_discrete(1.0, {-0.5, 2.0}, {0.8, 0.2});
  const CValField fa = field(in.a, in, skew, false), fb = field(in.b, in, skew, false);
  CHECK_THROWS_AS(commutator_average(fa, fb, in.state, in.basis, skew), InvalidModel);
  // The product average needs only the first two moments.
  const cplx prod = oracle::expect(0.5 * (in.a.adjoint() * in.b + in.b.adjoint() * in.a), in.psi);
  CHECK(std::abs(product_average(fa, fb, in.state, in.basis, skew).value - prod) < 1e-10);
}

TEST_CASE("weak value correlation") {
  oracle::Gen g(8);
  const Instance in = make(g, 5, false);
  const WeakValueField wa = weak_value_field(OperatorMatrix(in.a), in.state, in.basis);
  const WeakValueField wb = weak_value_field(OperatorMatrix(in.b), in.state, in.basis);
  CHECK(std::abs(weak_value_correlation(wa, wb) - oracle::expect(in.a.adjoint() * in.b, in.psi)) < 1e-10);
}

TEST_CASE("second-order statistics, d = 2..8") {
  oracle::Gen g(55);
  double worst = 0.0, spread = 0.0;
  for (int i = 0; i < 200; ++i) {
    const Index d = 2 + i % 7;
    const Instance in = make(g, d, true);
    const XiModel model = XiModel::of_kind(static_cast<XiKind>(i % 3));
    const CValField fa = field(in.a, in, model, true), fb = field(in.b, in, model, true);
    const double ma = oracle::expect(in.a, in.psi).real(), mb = oracle::expect(in.b, in.psi).real();
    const double cov = oracle::expect(0.5 * (in.a * in.b + in.b * in.a), in.psi).real() - ma * mb;
    const oracle::Mat diff = in.a - in.b;
    worst = std::max(worst, std::abs(covariance(fa, fb, in.state, in.basis, model).real() - cov));
    worst = std::max(worst, std::abs(variance(fa, in.state, in.basis, model).real() - oracle::variance(in.a, in.psi)));
    worst = std::max(worst, std::abs(statistical_deviation(fa, fb, in.state, in.basis, model).real() -
                                     oracle::expect(diff * diff, in.psi).real()));
    // Basis independence of the variance.
    double lo = 1e300, hi = -1e300;
    for (int k = 0; k < 10; ++k) {
      const oracle::Mat u = g.unitary(d);
      const OrthonormalBasis b(u);
      const CValField f = build_cval(OperatorMatrix(in.a, true), in.state, b, model);
      const double v = variance(f, in.state, b, model).real();
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    spread = std::max(spread, hi - lo);
  }
  CHECK(worst <= 1e-10);
  CHECK(spread <= 1e-9);
}

TEST_CASE("equivalence with a function of the reference observable") {
  oracle::Gen g(77);
  const Index d = 4;
  const oracle::Mat a = g.general(d), b = g.general(d), c = g.hermitian(d);
  const oracle::Vec psi = g.state(d);
  const std::vector<double> poly{0.5, -1.0, 2.0};
  const EquivalenceResult r = equivalence_theorem(OperatorMatrix(a), OperatorMatrix(b), poly,
                                                  OperatorMatrix(c, true), StateVector(psi),
                                                  XiModel::gaussian());
  const oracle::Mat f = 0.5 * oracle::Mat::Identity(d, d) - c + 2.0 * c * c;
  const cplx want = oracle::expect(0.5 * (a.adjoint() * b + b.adjoint() * a) + f, psi);
  CHECK(std::abs(r.oracle - want) < 1e-10);
  CHECK(std::abs(r.average.value - want) < 1e-10);
}

TEST_CASE("separable versus global xi") {
  oracle::Gen g(12);
  const OperatorMatrix a(g.general(2)), b(g.general(2));
  const OrthonormalBasis ba(g.unitary(2)), bb(g.unitary(2));
  const StateVector psi(g.state(4));
  const SeparableXiReport r = separable_xi_product(a, b, psi, ba, bb, XiModel::binary(), XiModel::binary());
  CHECK(r.residual < 1e-10);
  CHECK(std::abs(r.cross_term) > 1e-6);
}

TEST_CASE("mixed-state product average") {
  oracle::Gen g(15);
  const oracle::Vec s1 = g.state(3), s2 = g.state(3);
  const oracle::Mat a = g.general(3), b = g.general(3), u = g.unitary(3);
  const MixedEnsemble ens({0.25, 0.75}, {StateVector(s1), StateVector(s2)});
  const oracle::Mat sym = 0.5 * (a.adjoint() * b + b.adjoint() * a);
  const cplx want = 0.25 * oracle::expect(sym, s1) + 0.75 * oracle::expect(sym, s2);
  const EnsembleAverage r = mixed_product_average(ens, OperatorMatrix(a), OperatorMatrix(b),
                                                  OrthonormalBasis(u), XiModel::uniform());
  CHECK(std::abs(r.value - want) < 1e-10);
}

TEST_CASE("monte carlo route") {
  oracle::Gen g(19);
  const Instance in = make(g, 3, true);
  const XiModel model = XiModel::gaussian();
  const CValField fa = field(in.a, in, model, true), fb = field(in.b, in, model, true);
  const AverageOptions mc{AverageMethod::monte_carlo, 100000, 4, 1};
  const EnsembleAverage r = product_average(fa, fb, in.state, in.basis, model, mc);
  REQUIRE(r.mc_stderr.has_value());
  const EnsembleAverage ex = product_average(fa, fb, in.state, in.basis, model);
  CHECK(std::abs(r.value - ex.value) < 5.0 * *r.mc_stderr);
  const AverageOptions mc4{AverageMethod::monte_carlo, 100000, 4, 4};
  CHECK(product_average(fa, fb, in.state, in.basis, model, mc4).value == r.value);
  CHECK_FALSE(ex.mc_stderr.has_value());
}

TEST_CASE("provenance and masking") {
  oracle::Gen g(20);
  const Instance in = make(g, 3, true);
  const XiModel model = XiModel::binary();
  const CValField f = field(in.a, in, model, true);
  const StateVector other(g.state(3));
  CHECK_THROWS_AS(mean_cval(f, other, in.basis, model), ProvenanceMismatch);
  CHECK_THROWS_AS(check_provenance(f, in.state, OrthonormalBasis(g.unitary(3))), ProvenanceMismatch);
  CHECK_THROWS_AS(mean_cval(f, in.state, in.basis, XiModel::binary(2.0)), ProvenanceMismatch);

  // Masked entries carry zero Born weight; sigma_x on |0> keeps its mean.
  const auto comp = OrthonormalBasis::computational(2);
  const StateVector zero = StateVector::basis_state(2, 0);
  const CValField fx = build_cval(presets::sigma_x(), zero, comp, model);
  const EnsembleAverage m = mean_cval(fx, zero, comp, model);
  CHECK(std::abs(m.real()) < 1e-15);
  CHECK(m.masked_weight == 0.0);
}

TEST_CASE("covariance rejects non-Hermitian inputs") {
  oracle::Gen g(21);
  const Instance in = make(g, 3, false);
  const XiModel model = XiModel::binary();
  const CValField fa = field(in.a, in, model, false);
  CHECK_THROWS_AS(variance(fa, in.state, in.basis, model), NotHermitian);
}

TEST_CASE("verification records") {
  EnsembleAverage avg;
  avg.value = {1.0, 0.5};
  const VerificationRecord r = make_record("product", {1, 2, 3}, avg, {1.0, 0.25});
  CHECK(r.abs_error == doctest::Approx(0.25));
  CHECK(r.input_ids.size() == 3);
}
