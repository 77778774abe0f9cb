#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"

namespace cvl::cli {

enum class CheckKind { error, slack };

// error checks pass when max_abs_error <= threshold, slack checks when
// min_slack >= -threshold.
struct CheckRecord {
  std::string name;
  CheckKind kind = CheckKind::error;
  long instances = 0;
  double max_abs_error = 0.0;
  double min_slack = 0.0;
  double masked_weight_max = 0.0;
  double threshold = 0.0;
  bool pass = true;
};

struct SuiteReport {
  std::vector<CheckRecord> records;
  bool pass = true;
  double runtime_seconds = 0.0;
  std::uint64_t seed = 0;
  std::string xi;
};

SuiteReport run_verify(const RunConfig& config);

void write_report(std::ostream& out, const SuiteReport& report, Format format);
void print_summary(std::ostream& out, const SuiteReport& report);

}  // namespace cvl::cli
