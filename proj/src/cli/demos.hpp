#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"

namespace cvl::cli {

const std::vector<std::string>& demo_names();

// Prints a summary to `out`, writes CSV artifacts into config.output_dir when
// it is set, and returns true iff every embedded assertion held. Throws
// InvalidArgument for an unknown name.
bool run_demo(const std::string& name, const RunConfig& config, std::ostream& out);

}  // namespace cvl::cli
