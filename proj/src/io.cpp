#include "cvl/io.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace cvl::io {

namespace {

json complex_array(const CVector& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back({v[i].real(), v[i].imag()});
  return arr;
}

json complex_matrix(const CMatrix& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

cplx read_pair(const json& p) {
  if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
    throw InvariantViolation("expected a [re, im] pair");
  }
  return {p[0].get<double>(), p[1].get<double>()};
}

CVector read_vector(const json& arr) {
  if (!arr.is_array() || arr.empty()) throw InvariantViolation("expected a nonempty array");
  CVector v(static_cast<Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<Index>(i)] = read_pair(arr[i]);
  return v;
}

CMatrix read_matrix(const json& rows) {
  if (!rows.is_array() || rows.empty()) throw InvariantViolation("expected a nonempty row array");
  const auto d = static_cast<Index>(rows.size());
  CMatrix m(d, d);
  for (Index r = 0; r < d; ++r) {
    const json& row = rows[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Index>(row.size()) != d) {
      throw InvariantViolation("matrix must be square");
    }
    for (Index c = 0; c < d; ++c) m(r, c) = read_pair(row[static_cast<std::size_t>(c)]);
  }
  return m;
}

void expect_type(const json& j, const char* type) {
  if (!j.is_object() || j.value("type", "") != type) {
    throw InvariantViolation(std::string("expected a JSON object of type '") + type + "'");
  }
}

std::string hex(std::uint64_t id) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << id;
  return s.str();
}

json complex_json(cplx z) { return {z.real(), z.imag()}; }

}  // namespace

json to_json(const StateVector& psi) {
  return {{"type", "state"}, {"dim", psi.dim()}, {"amplitudes", complex_array(psi.amplitudes())}};
}

json to_json(const OperatorMatrix& op) {
  return {{"type", "operator"},
          {"dim", op.dim()},
          {"hermitian", op.hermitian()},
          {"entries", complex_matrix(op.matrix())}};
}

json to_json(const OrthonormalBasis& basis) {
  json vectors = json::array();
  for (Index n = 0; n < basis.size(); ++n) {
    vectors.push_back(complex_array(basis.columns().col(n)));
  }
  return {{"type", "basis"}, {"dim", basis.dim()}, {"vectors", std::move(vectors)}};
}

json to_json(const EnsembleAverage& avg) {
  json j = {{"value", complex_json(avg.value)},
            {"method", std::string(to_string(avg.method))},
            {"masked_weight", avg.masked_weight},
            {"samples", avg.samples}};
  if (avg.mc_stderr) j["mc_stderr"] = *avg.mc_stderr;
  return j;
}

json to_json(const VerificationRecord& r) {
  json ids = json::array();
  for (auto id : r.input_ids) ids.push_back(hex(id));
  json j = {{"operation", r.operation},
            {"inputs", std::move(ids)},
            {"method", std::string(to_string(r.method))},
            {"value", complex_json(r.value)},
            {"oracle", complex_json(r.oracle)},
            {"abs_error", r.abs_error},
            {"masked_weight", r.masked_weight}};
  if (r.mc_stderr) j["mc_stderr"] = *r.mc_stderr;
  return j;
}

json to_json(const BoundReport& r) {
  return {{"kind", std::string(to_string(r.kind))},
          {"lhs", r.lhs},
          {"rhs", r.rhs},
          {"slack", r.slack},
          {"seed", r.seed},
          {"aux_residual", r.aux_residual},
          {"masked_weight", r.masked_weight}};
}

json to_json(const EstimationReport& r) {
  return {{"ms_error", r.ms_error},
          {"ms_decomposed", r.ms_decomposed},
          {"estimator_term", r.estimator_term},
          {"error_term", r.error_term},
          {"bias", r.bias},
          {"masked_weight", r.masked_weight},
          {"optimal", r.optimal}};
}

StateVector state_from_json(const json& j) {
  expect_type(j, "state");
  CVector v = read_vector(j.at("amplitudes"));
  if (j.contains("dim") && j["dim"].get<Index>() != v.size()) {
    throw InvariantViolation("state dim field disagrees with amplitude count");
  }
  return StateVector(std::move(v));
}

OperatorMatrix operator_from_json(const json& j) {
  expect_type(j, "operator");
  CMatrix m = read_matrix(j.at("entries"));
  if (j.contains("dim") && j["dim"].get<Index>() != m.rows()) {
    throw InvariantViolation("operator dim field disagrees with entries");
  }
  return OperatorMatrix(std::move(m), j.value("hermitian", false));
}

OrthonormalBasis basis_from_json(const json& j) {
  expect_type(j, "basis");
  const json& vectors = j.at("vectors");
  if (!vectors.is_array() || vectors.empty()) throw InvariantViolation("basis has no vectors");
  const auto d = static_cast<Index>(vectors.size());
  CMatrix cols(d, d);
  for (Index n = 0; n < d; ++n) {
    CVector v = read_vector(vectors[static_cast<std::size_t>(n)]);
    if (v.size() != d) throw InvariantViolation("basis vectors must have length equal to their count");
    cols.col(n) = v;
  }
  return OrthonormalBasis(std::move(cols));
}

void write_csv(std::ostream& out, const WeakValueField& f) {
  out << "n,re,im,born_weight,masked\n" << std::setprecision(17);
  for (Index n = 0; n < f.size(); ++n) {
    const bool ok = f.valid[static_cast<std::size_t>(n)];
    out << n << ',' << f.real_parts[n] << ',' << f.imag_parts[n] << ',' << f.born_weights[n]
        << ',' << (ok ? 0 : 1) << '\n';
  }
}

void write_csv(std::ostream& out, const CValField& f) {
  out << "n,re_part,im_part,born_weight\n" << std::setprecision(17);
  for (Index n = 0; n < f.size(); ++n) {
    out << n << ',';
    if (f.is_valid(n)) out << f.re_part[n] << ',' << f.im_part[n];
    else out << ',';
    out << ',' << f.born_weights[n] << '\n';
  }
}

void write_csv(std::ostream& out, const JointHistogram& h) {
  out << "a,b,weight\n" << std::setprecision(17);
  for (const auto& p : h.points) out << p.a << ',' << p.b << ',' << p.weight << '\n';
}

void write_csv(std::ostream& out, const std::vector<BoundReport>& reports) {
  out << "kind,lhs,rhs,slack,seed\n" << std::setprecision(17);
  for (const auto& r : reports) {
    out << to_string(r.kind) << ',' << r.lhs << ',' << r.rhs << ',' << r.slack << ',' << r.seed
        << '\n';
  }
}

void write_csv(std::ostream& out, const std::vector<ScanRow>& rows) {
  out << "s,ms_error\n" << std::setprecision(17);
  for (const auto& r : rows) out << r.scale << ',' << r.ms_error << '\n';
}

void write_profile_csv(std::ostream& out, const GridWavefunction& wf, double mass) {
  const GridCVal p = momentum_field(wf);
  const GridCVal h = hamiltonian_free_field(wf, mass);
  const double hb = wf.hbar();
  out << "q,rho,S,p_plus,p_minus,h_plus,h_minus\n" << std::setprecision(12);
  for (Index j = 0; j < wf.grid().points; ++j) {
    out << wf.grid().q(j) << ',' << wf.rho()[j] << ',' << wf.action()[j];
    if (p.is_valid(j) && h.is_valid(j)) {
      out << ',' << p.value(j, hb) << ',' << p.value(j, -hb) << ',' << h.value(j, hb) << ','
          << h.value(j, -hb);
    } else {
      out << ",,,,";
    }
    out << '\n';
  }
}

OperatorMatrix parse_matrix_file(std::istream& in) {
  std::string line;
  Index d = -1;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("dim=", 0) != 0) throw InvalidArgument("matrix file must start with 'dim=d'");
    try {
      d = std::stol(line.substr(4));
    } catch (const std::exception&) {
      throw InvalidArgument("bad dimension header '" + line + "'");
    }
    break;
  }
  if (d < 2) throw InvalidArgument("matrix file needs dim >= 2");
  CMatrix m(d, d);
  Index row = 0;
  while (row < d && std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> nums;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        nums.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        throw InvalidArgument("bad number '" + cell + "' in matrix row " + std::to_string(row));
      }
    }
    if (static_cast<Index>(nums.size()) != 2 * d) {
      throw InvalidArgument("matrix row " + std::to_string(row) + " needs " +
                            std::to_string(2 * d) + " numbers");
    }
    for (Index c = 0; c < d; ++c) {
      m(row, c) = {nums[static_cast<std::size_t>(2 * c)], nums[static_cast<std::size_t>(2 * c + 1)]};
    }
    ++row;
  }
  if (row != d) throw InvalidArgument("matrix file has fewer rows than dim");
  return OperatorMatrix(std::move(m), false);
}

OperatorMatrix load_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open matrix file '" + path + "'");
  return parse_matrix_file(in);
}

}  // namespace cvl::io
