#pragma once

// Serialization: JSON for states, operators, bases and records, CSV for
// fields, histograms, bound batches and grid profiles, and the plain-text
// matrix file format
//
//   dim=2
//   0,0, 1,0
//   1,0, 0,0
//
// (one row per line, re,im pairs separated by commas).

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "cvl/contvar.hpp"
#include "cvl/estimation.hpp"
#include "cvl/statistics.hpp"
#include "cvl/uncertainty.hpp"

namespace cvl::io {

using nlohmann::json;

json to_json(const StateVector& psi);
json to_json(const OperatorMatrix& op);
json to_json(const OrthonormalBasis& basis);
json to_json(const EnsembleAverage& avg);
json to_json(const VerificationRecord& record);
json to_json(const BoundReport& report);
json to_json(const EstimationReport& report);

// Loaders validate the type invariants and throw InvariantViolation (or a
// more specific cvl::Error) on malformed documents.
StateVector state_from_json(const json& j);
OperatorMatrix operator_from_json(const json& j);
OrthonormalBasis basis_from_json(const json& j);

void write_csv(std::ostream& out, const WeakValueField& field);
void write_csv(std::ostream& out, const CValField& field);
void write_csv(std::ostream& out, const JointHistogram& hist);
void write_csv(std::ostream& out, const std::vector<BoundReport>& reports);
void write_csv(std::ostream& out, const std::vector<ScanRow>& rows);
// Columns q, rho, S, p~(+hbar), p~(-hbar), H~(+hbar), H~(-hbar); masked
// points leave the c-value columns empty.
void write_profile_csv(std::ostream& out, const GridWavefunction& wf, double mass);

OperatorMatrix parse_matrix_file(std::istream& in);
OperatorMatrix load_matrix_file(const std::string& path);

}  // namespace cvl::io
