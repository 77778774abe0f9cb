#include <doctest.h>

#include "cli/config.hpp"
#include "cli/suite.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace cvl;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(CVAL_LAB_EXE) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path.string();
}

}  // namespace

TEST_CASE("dimension lists") {
  CHECK(cli::parse_dims("2..5") == std::vector<int>{2, 3, 4, 5});
  CHECK(cli::parse_dims("2,4,8") == std::vector<int>{2, 4, 8});
  CHECK_THROWS_AS(cli::parse_dims("1..3"), InvalidArgument);
  CHECK_THROWS_AS(cli::parse_dims("5..2"), InvalidArgument);
  CHECK_THROWS_AS(cli::parse_dims("x"), InvalidArgument);
}

TEST_CASE("config files") {
  const std::string path = write_temp("cval_lab_test.cfg",
                                      "# run\nseed = 7\nxi=gaussian\ndims=2,3\ntrials=5\nhbar=0.5\n");
  const cli::RunConfig c = cli::load_config_file(path);
  CHECK(c.seed == 7);
  CHECK(c.xi == XiKind::gaussian);
  CHECK(c.dims == std::vector<int>{2, 3});
  CHECK(c.trials == 5);
  CHECK(c.hbar == 0.5);

  CHECK_THROWS_AS(cli::load_config_file(write_temp("cval_lab_bad1.cfg", "colour=blue\n")), InvalidArgument);
  CHECK_THROWS_AS(cli::load_config_file(write_temp("cval_lab_bad2.cfg", "seed=abc\n")), InvalidArgument);
  CHECK_THROWS_AS(cli::load_config_file("/nonexistent.cfg"), InvalidArgument);

  cli::RunConfig bad;
  bad.hbar = -1.0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("worker count respects the environment cap") {
  cli::RunConfig c;
  c.workers = 64;
  ::setenv("CVAL_LAB_THREADS", "1", 1);
  CHECK(cli::effective_workers(c) == 1);
  ::unsetenv("CVAL_LAB_THREADS");
  c.workers = 0;
  CHECK(cli::effective_workers(c) >= 1);
}

TEST_CASE("verify is deterministic for a fixed seed") {
  cli::RunConfig c;
  c.trials = 5;
  c.dims = {2, 3, 4};
  const cli::SuiteReport a = cli::run_verify(c);
  c.workers = 3;
  const cli::SuiteReport b = cli::run_verify(c);
  CHECK(a.pass);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].name == b.records[i].name);
    CHECK(a.records[i].max_abs_error == b.records[i].max_abs_error);
    CHECK(a.records[i].min_slack == b.records[i].min_slack);
  }
  std::ostringstream ja, jb;
  cli::write_report(ja, a, cli::Format::csv);
  cli::write_report(jb, b, cli::Format::csv);
  CHECK(ja.str() == jb.str());
}

TEST_CASE("exit codes") {
  CHECK(run("verify --trials 3 --dims 2,3") == 0);
  CHECK(run("verify --trials 3 --dims 2 --corrupt-check product_average") == 1);
  CHECK(run("verify --trials 3 --corrupt-check no_such_check") == 2);
  CHECK(run("verify --xi cauchy") == 2);
  CHECK(run("verify --dims 1..3") == 2);
  CHECK(run("verify --hbar -1") == 2);
  CHECK(run("demo no_such_demo") == 2);
  CHECK(run("") == 2);
  CHECK(run("--help") == 0);
  CHECK(run("sample --op /nonexistent/matrix.txt") == 2);
  CHECK(run("sample --op sigma_x --samples 2000 --state plus") == 0);
}
