#pragma once

#include <iosfwd>
#include <string>

#include "config.hpp"
#include "cvl/hilbert.hpp"

namespace cvl::cli {

// Operators: sigma_x, sigma_y, sigma_z, spin1_x, spin1_y, spin1_z, or a
// matrix file path. Bases: computational, haar, eigen:<operator>.
// States: haar, plus, minus, plus_i, bell, or a basis index k.
struct SampleSpec {
  std::string op = "sigma_x";
  std::string op_b;  // optional second operator for pair quantities
  std::string basis = "haar";
  std::string state = "haar";
  long samples = 100000;
  int repeats = 1;
};

OperatorMatrix parse_operator_spec(const std::string& spec);

// Writes CSV rows (quantity, exact, mc, stderr, n_samples); returns the
// number of rows whose MC estimate lies more than 4 stderr from exact.
int run_sample(const RunConfig& config, const SampleSpec& spec, std::ostream& out);

}  // namespace cvl::cli
