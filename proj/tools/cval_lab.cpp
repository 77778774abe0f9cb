// cval_lab: randomized verification suite, named demos and Monte Carlo runs.
//
// Exit codes: 0 pass, 1 assertion failure, 2 usage or configuration error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "cli/config.hpp"
#include "cli/demos.hpp"
#include "cli/sample.hpp"
#include "cli/suite.hpp"

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

std::ofstream open_output(const std::string& dir, const std::string& file) {
  std::filesystem::create_directories(dir);
  std::ofstream out(std::filesystem::path(dir) / file);
  if (!out) throw cvl::InvalidArgument("cannot write " + file + " in " + dir);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"c-valued physical quantities from weak values: verification and demos"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> hbar;
  std::string xi, dims, out_dir, format;
  std::optional<int> trials;
  std::optional<unsigned> workers;
  std::string corrupt;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "flat key=value run config")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "root seed");
    sub->add_option("--hbar", hbar, "Planck constant (action units)");
    sub->add_option("--xi", xi, "xi distribution")
        ->check(CLI::IsMember({"binary", "uniform", "gaussian"}));
    sub->add_option("--out", out_dir, "directory for reports and CSV artifacts");
    sub->add_option("--format", format, "report format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--workers", workers, "worker threads (capped by CVAL_LAB_THREADS)");
  };

  CLI::App* verify = app.add_subcommand("verify", "run the randomized identity and bound suite");
  common(verify);
  verify->add_option("--trials", trials, "random instances per dimension");
  verify->add_option("--dims", dims, "dimensions, e.g. 2..6 or 2,4,8");
  verify->add_option("--corrupt-check", corrupt)->group("");

  std::string demo_name;
  CLI::App* demo = app.add_subcommand("demo", "run a named demonstration");
  common(demo);
  demo->add_option("name", demo_name, "demo name")
      ->required()
      ->check(CLI::IsMember(cvl::cli::demo_names()));

  cvl::cli::SampleSpec spec;
  CLI::App* sample = app.add_subcommand("sample", "Monte Carlo estimates against exact values");
  common(sample);
  sample->add_option("--op", spec.op, "operator preset or matrix file");
  sample->add_option("--op-b", spec.op_b, "second operator for pair quantities");
  sample->add_option("--basis", spec.basis, "computational, haar or eigen:<operator>");
  sample->add_option("--state", spec.state, "haar, plus, minus, plus_i, bell or an index");
  sample->add_option("--samples", spec.samples, "draws per estimate")->check(CLI::PositiveNumber);
  sample->add_option("--repeats", spec.repeats, "independent estimates per quantity")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  cvl::cli::RunConfig config;
  try {
    if (!config_path.empty()) config = cvl::cli::load_config_file(config_path);
    if (seed) config.seed = *seed;
    if (hbar) config.hbar = *hbar;
    if (!xi.empty()) config.xi = cvl::parse_xi_kind(xi);
    if (trials) config.trials = *trials;
    if (!dims.empty()) config.dims = cvl::cli::parse_dims(dims);
    if (!out_dir.empty()) config.output_dir = out_dir;
    if (!format.empty()) config.format = cvl::cli::parse_format(format);
    if (workers) config.workers = *workers;
    config.corrupt_check = corrupt;
    config.validate();
  } catch (const cvl::Error& e) {
    std::cerr << "cval_lab: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (verify->parsed()) {
      const cvl::cli::SuiteReport report = cvl::cli::run_verify(config);
      cvl::cli::print_summary(std::cout, report);
      if (!config.output_dir.empty()) {
        const bool csv = config.format == cvl::cli::Format::csv;
        auto out = open_output(config.output_dir, csv ? "verify.csv" : "verify.json");
        cvl::cli::write_report(out, report, config.format);
      }
      return report.pass ? kPass : kFail;
    }
    if (demo->parsed()) {
      return cvl::cli::run_demo(demo_name, config, std::cout) ? kPass : kFail;
    }
    if (sample->parsed()) {
      int outliers = 0;
      if (config.output_dir.empty()) {
        outliers = cvl::cli::run_sample(config, spec, std::cout);
      } else {
        auto out = open_output(config.output_dir, "sample.csv");
        outliers = cvl::cli::run_sample(config, spec, out);
      }
      std::cerr << "sample: " << outliers << " estimate(s) beyond 4 stderr\n";
      return kPass;
    }
  } catch (const cvl::InvalidArgument& e) {
    std::cerr << "cval_lab: " << e.what() << '\n';
    return kUsage;
  } catch (const cvl::InvariantViolation& e) {
    std::cerr << "cval_lab: " << e.what() << '\n';
    return kUsage;
  } catch (const cvl::DimensionMismatch& e) {
    std::cerr << "cval_lab: " << e.what() << '\n';
    return kUsage;
  } catch (const cvl::Error& e) {
    std::cerr << "cval_lab: " << e.what() << '\n';
    return kFail;
  }
  return kUsage;
}
