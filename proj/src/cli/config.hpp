#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cvl/contvar.hpp"
#include "cvl/cval.hpp"

namespace cvl::cli {

enum class Format { json, csv };

// Flat key=value file; '#' starts a comment. Keys match the long flag names:
//   seed, hbar, xi, dims, trials, out, format, workers,
//   grid_min, grid_max, grid_points
struct RunConfig {
  std::uint64_t seed = 42;
  double hbar = 1.0;
  XiKind xi = XiKind::binary;
  std::vector<int> dims = {2, 3, 4, 5, 6};
  int trials = 200;
  Grid grid{-10.0, 10.0, 4096};
  std::string output_dir;
  Format format = Format::json;
  unsigned workers = 1;
  std::string corrupt_check;  // test hook: perturbs the named check

  // Throws InvalidArgument on out-of-range values.
  void validate() const;
  XiModel xi_model() const { return XiModel::of_kind(xi, hbar, seed); }
};

// Applies the file's keys on top of `base`. Unknown keys and malformed
// values throw InvalidArgument.
RunConfig load_config_file(const std::string& path, RunConfig base = {});

// "2..6" or "2,3,8".
std::vector<int> parse_dims(const std::string& text);
Format parse_format(const std::string& text);

// min(config.workers, CVAL_LAB_THREADS, hardware threads), at least 1.
unsigned effective_workers(const RunConfig& config);

}  // namespace cvl::cli
