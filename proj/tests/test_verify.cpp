#include "doctest.h"

#include "sparsedom/experiments.hpp"
#include "sparsedom/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

using namespace sparsedom;

namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  REQUIRE(is.good());
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("sparsedom_test_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_file(const fs::path& p, const std::string& body) {
  std::ofstream os(p);
  os << body;
}

}  // namespace

TEST_CASE("slope fit on exact power data") {
  const std::vector<double> xs = {1.0, 2.0, 4.0, 8.0, 16.0};
  std::vector<double> ys;
  for (double x : xs) ys.push_back(3.0 * x * x);
  const SlopeFit fit = slope_fit(xs, ys);
  CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit.std_err <= 1e-10);

  std::vector<double> flat(xs.size(), 7.0);
  CHECK(slope_fit(xs, flat).slope == doctest::Approx(0.0));

  CHECK_THROWS_AS(slope_fit({1.0, 2.0}, {1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(slope_fit({1.0, 2.0, 3.0}, {1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(slope_fit({1.0, 2.0, 3.0}, {1.0, -2.0, 3.0}), std::invalid_argument);
  CHECK_THROWS_AS(slope_fit({1.0, 1.0, 1.0}, {1.0, 2.0, 3.0}), std::invalid_argument);
}

TEST_CASE("number formatting round-trips cleanly") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-2.5e-07) == "-2.5e-07");
  CHECK(format_double(1234567.25) == "1234567.25");
}

TEST_CASE("param builder emits flat JSON") {
  const std::string s =
      ParamJson().add("case", "x\"y").add("t", 2.0).add("n", 3).str();
  CHECK(s == "{\"case\":\"x\\\"y\",\"t\":2,\"n\":3}");
}

TEST_CASE("CSV writer quotes and headers") {
  const fs::path dir = fresh_dir("csv");
  ReportRow row;
  row.experiment = "E0";
  row.param_json = "{\"k\":\"a,b\"}";
  row.lhs = 1.5;
  row.rhs = 3.0;
  row.ratio = 0.5;
  row.pass = true;
  ReportRow bad = row;
  bad.pass = false;
  write_csv((dir / "r.csv").string(), {row, bad});
  const std::string body = slurp(dir / "r.csv");
  CHECK(body.find("experiment,param_json,lhs,rhs,ratio,slope,stderr,pass") == 0);
  CHECK(body.find("\"{\"\"k\"\":\"\"a,b\"\"}\"") != std::string::npos);
  CHECK(body.find(",true\n") != std::string::npos);
  CHECK(body.find(",false\n") != std::string::npos);

  write_summary((dir / "s.json").string(), "E0", {row, bad});
  const std::string summary = slurp(dir / "s.json");
  CHECK(summary.find("\"experiment\": \"E0\"") != std::string::npos);
  CHECK(summary.find("\"rows\": 2") != std::string::npos);
  CHECK(summary.find("\"failed\": 1") != std::string::npos);
  CHECK(summary.find("\"pass\": false") != std::string::npos);
}

TEST_CASE("SVG writer emits one polyline per series") {
  const fs::path dir = fresh_dir("svg");
  write_svg((dir / "p.svg").string(), "title",
            {{"a", {1.0, 2.0, 4.0}, {1.0, 4.0, 16.0}}, {"b", {1.0, 2.0, 4.0}, {2.0, 2.0, 2.0}}});
  const std::string body = slurp(dir / "p.svg");
  CHECK(body.find("<svg") != std::string::npos);
  std::size_t count = 0;
  for (std::size_t at = body.find("<polyline"); at != std::string::npos;
       at = body.find("<polyline", at + 1))
    ++count;
  CHECK(count == 2);
}

TEST_CASE("unknown experiment ids are rejected with the valid list") {
  RunOptions opt;
  opt.experiment = "E9";
  opt.out_dir = fresh_dir("badid").string();
  try {
    run_experiment(opt);
    FAIL("expected an exception");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("E9") != std::string::npos);
    CHECK(msg.find("E1") != std::string::npos);
    CHECK(msg.find("E8") != std::string::npos);
  }
}

TEST_CASE("unknown config keys are rejected") {
  const fs::path dir = fresh_dir("badkey");
  write_file(dir / "cfg.json", "{\"cells\": 4096, \"bogus_knob\": 1}");
  RunOptions opt;
  opt.experiment = "E5";
  opt.config_path = (dir / "cfg.json").string();
  opt.out_dir = (dir / "out").string();
  try {
    run_experiment(opt);
    FAIL("expected an exception");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("bogus_knob") != std::string::npos);
    CHECK(msg.find("cells") != std::string::npos);  // known keys are listed
  }

  write_file(dir / "type.json", "{\"cells\": \"many\"}");
  opt.config_path = (dir / "type.json").string();
  CHECK_THROWS_AS(run_experiment(opt), std::invalid_argument);
}

TEST_CASE("experiment runs are deterministic and report failures in the exit code") {
  const fs::path a = fresh_dir("det_a");
  const fs::path b = fresh_dir("det_b");
  RunOptions opt;
  opt.experiment = "E5";
  write_file(a / "cfg.json", "{\"cells\": 4096, \"depths\": [3, 4, 5]}");
  opt.config_path = (a / "cfg.json").string();
  opt.out_dir = (a / "out").string();
  CHECK(run_experiment(opt) == 0);
  opt.out_dir = (b / "out").string();
  CHECK(run_experiment(opt) == 0);
  CHECK(slurp(a / "out" / "report.csv") == slurp(b / "out" / "report.csv"));
  CHECK(slurp(a / "out" / "summary.json") == slurp(b / "out" / "summary.json"));
  CHECK(slurp(a / "out" / "report.csv").find("E5,") != std::string::npos);

  // an unreachable bound flips rows to failing and the exit code to 1
  write_file(a / "hard.json", "{\"cells\": 4096, \"depths\": [3], \"bound_coeff\": 9.0}");
  opt.config_path = (a / "hard.json").string();
  opt.out_dir = (a / "hard_out").string();
  CHECK(run_experiment(opt) == 1);
  CHECK(slurp(a / "hard_out" / "summary.json").find("\"pass\": false") != std::string::npos);
}

TEST_CASE("random-suite experiments are seed-deterministic") {
  const fs::path a = fresh_dir("seed_a");
  const fs::path b = fresh_dir("seed_b");
  write_file(a / "cfg.json",
             "{\"cells\": 128, \"families\": 1, \"pairs\": 1, \"weight_powers\": [0.1]}");
  RunOptions opt;
  opt.experiment = "E7";
  opt.config_path = (a / "cfg.json").string();
  opt.out_dir = (a / "out").string();
  REQUIRE(run_experiment(opt) == 0);
  opt.out_dir = (b / "out").string();
  REQUIRE(run_experiment(opt) == 0);
  CHECK(slurp(a / "out" / "report.csv") == slurp(b / "out" / "report.csv"));

  // a different seed changes the sampled suite
  opt.seed = 77;
  opt.seed_from_cli = true;
  opt.out_dir = (b / "out77").string();
  REQUIRE(run_experiment(opt) == 0);
  CHECK(slurp(b / "out77" / "report.csv") != slurp(b / "out" / "report.csv"));
}

TEST_CASE("threaded runs reproduce the serial report") {
  const fs::path a = fresh_dir("thr_a");
  const fs::path b = fresh_dir("thr_b");
  write_file(a / "cfg.json",
             "{\"cells\": 128, \"families\": 2, \"pairs\": 1, \"weight_powers\": [0.1, -0.1]}");
  RunOptions opt;
  opt.experiment = "E7";
  opt.config_path = (a / "cfg.json").string();
  opt.out_dir = (a / "out").string();
  opt.threads = 1;
  REQUIRE(run_experiment(opt) == 0);
  opt.out_dir = (b / "out").string();
  opt.threads = 4;
  REQUIRE(run_experiment(opt) == 0);
  CHECK(slurp(a / "out" / "report.csv") == slurp(b / "out" / "report.csv"));
}
