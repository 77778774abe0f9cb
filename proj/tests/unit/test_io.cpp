#include <doctest.h>

#include "cvl/io.hpp"
#include "support/oracles.hpp"

#include <sstream>

using namespace cvl;

namespace {

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("json round trips") {
  oracle::Gen g(81);
  const StateVector psi(g.state(3));
  const StateVector psi2 = io::state_from_json(io::to_json(psi));
  CHECK((psi2.amplitudes() - psi.amplitudes()).cwiseAbs().maxCoeff() == 0.0);

  const OperatorMatrix op(g.general(3));
  const OperatorMatrix op2 = io::operator_from_json(io::to_json(op));
  CHECK((op2.matrix() - op.matrix()).cwiseAbs().maxCoeff() == 0.0);

  const OrthonormalBasis b(g.unitary(3));
  const OrthonormalBasis b2 = io::basis_from_json(io::to_json(b));
  CHECK((b2.columns() - b.columns()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(b2.id() == b.id());
}

TEST_CASE("json loaders reject malformed documents") {
  auto j = io::to_json(presets::plus());
  j["amplitudes"][0] = {2.0, 0.0};
  CHECK_THROWS_AS(io::state_from_json(j), InvariantViolation);
  CHECK_THROWS_AS(io::state_from_json(io::json{{"type", "operator"}}), InvariantViolation);
  auto b = io::to_json(OrthonormalBasis::computational(2));
  b["vectors"][1] = b["vectors"][0];
  CHECK_THROWS_AS(io::basis_from_json(b), InvariantViolation);
}

TEST_CASE("records serialize their fields") {
  EnsembleAverage avg;
  avg.value = {0.5, -0.25};
  avg.method = AverageMethod::monte_carlo;
  avg.mc_stderr = 0.01;
  const auto j = io::to_json(avg);
  CHECK(j.at("method") == "monte_carlo");
  CHECK(j.at("mc_stderr").get<double>() == 0.01);
  BoundReport r;
  r.lhs = 2.0;
  r.rhs = 1.0;
  r.slack = 1.0;
  CHECK(io::to_json(r).at("kind") == "schrodinger");
}

TEST_CASE("csv writers") {
  const WeakValueField f = weak_value_field(presets::sigma_x(), StateVector::basis_state(2, 0),
                                            OrthonormalBasis::computational(2));
  std::ostringstream out;
  io::write_csv(out, f);
  const auto l = lines(out.str());
  REQUIRE(l.size() == 3);
  CHECK(l[0] == "n,re,im,born_weight,masked");

  std::ostringstream bounds;
  io::write_csv(bounds, std::vector<BoundReport>{BoundReport{}});
  CHECK(lines(bounds.str())[0] == "kind,lhs,rhs,slack,seed");

  std::ostringstream scan;
  io::write_csv(scan, std::vector<ScanRow>{{1.0, 0.5}, {0.0, 0.0}});
  CHECK(lines(scan.str()).size() == 3);
}

TEST_CASE("matrix files") {
  std::istringstream ok("dim=2\n0,0, 1,0\n1,0, 0,0\n");
  const OperatorMatrix sx = io::parse_matrix_file(ok);
  CHECK((sx.matrix() - presets::sigma_x().matrix()).cwiseAbs().maxCoeff() == 0.0);

  std::istringstream comments("# sigma_y\ndim=2\n0,0, 0,-1\n0,1, 0,0\n");
  CHECK((io::parse_matrix_file(comments).matrix() - presets::sigma_y().matrix()).cwiseAbs().maxCoeff() == 0.0);

  std::istringstream short_row("dim=2\n0,0, 1,0\n1,0\n");
  CHECK_THROWS_AS(io::parse_matrix_file(short_row), InvalidArgument);
  std::istringstream no_header("0,0, 1,0\n1,0, 0,0\n");
  CHECK_THROWS_AS(io::parse_matrix_file(no_header), InvalidArgument);
  CHECK_THROWS_AS(io::load_matrix_file("/nonexistent/matrix.txt"), InvalidArgument);
}
