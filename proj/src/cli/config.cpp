#include "config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

namespace cvl::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  T out{};
  in >> out;
  if (in.fail() || !in.eof()) {
    throw InvalidArgument("config key '" + key + "': cannot parse '" + value + "'");
  }
  return out;
}

}  // namespace

void RunConfig::validate() const {
  if (!(hbar > 0.0)) throw InvalidArgument("hbar must be positive");
  if (trials < 1) throw InvalidArgument("trials must be >= 1");
  if (dims.empty()) throw InvalidArgument("dims must not be empty");
  for (int d : dims) {
    if (d < 2 || d > 64) throw InvalidArgument("dims must lie in [2, 64]");
  }
  if (workers < 1) throw InvalidArgument("workers must be >= 1");
  grid.validate();
}

std::vector<int> parse_dims(const std::string& text) {
  std::vector<int> out;
  const auto range = text.find("..");
  try {
    if (range != std::string::npos) {
      const int lo = std::stoi(text.substr(0, range));
      const int hi = std::stoi(text.substr(range + 2));
      if (hi < lo) throw InvalidArgument("empty dims range '" + text + "'");
      for (int d = lo; d <= hi; ++d) out.push_back(d);
    } else {
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ',')) out.push_back(std::stoi(trim(item)));
    }
  } catch (const std::logic_error&) {
    throw InvalidArgument("cannot parse dims '" + text + "'");
  }
  for (int d : out) {
    if (d < 2) throw InvalidArgument("dims must be >= 2, got '" + text + "'");
  }
  return out;
}

Format parse_format(const std::string& text) {
  if (text == "json") return Format::json;
  if (text == "csv") return Format::csv;
  throw InvalidArgument("format must be json or csv, got '" + text + "'");
}

RunConfig load_config_file(const std::string& path, RunConfig cfg) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file '" + path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgument(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "hbar") cfg.hbar = parse_number<double>(key, value);
    else if (key == "xi") cfg.xi = parse_xi_kind(value);
    else if (key == "dims") cfg.dims = parse_dims(value);
    else if (key == "trials") cfg.trials = parse_number<int>(key, value);
    else if (key == "out") cfg.output_dir = value;
    else if (key == "format") cfg.format = parse_format(value);
    else if (key == "workers") cfg.workers = parse_number<unsigned>(key, value);
    else if (key == "grid_min") cfg.grid.q_min = parse_number<double>(key, value);
    else if (key == "grid_max") cfg.grid.q_max = parse_number<double>(key, value);
    else if (key == "grid_points") cfg.grid.points = parse_number<long>(key, value);
    else throw InvalidArgument(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  return cfg;
}

unsigned effective_workers(const RunConfig& config) {
  unsigned cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CVAL_LAB_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) cap = std::min<unsigned>(cap, static_cast<unsigned>(v));
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::min(cap, config.workers));
}

}  // namespace cvl::cli
