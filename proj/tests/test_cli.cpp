#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "bpb/experiment.hpp"

using namespace bpb;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
  fs::path dir = fs::temp_directory_path() / ("bpb_test_" + tag);
  fs::create_directories(dir);
  return dir;
}

nlohmann::json read_summary(const fs::path& dir) {
  std::ifstream in(dir / "summary.json");
  REQUIRE(in.good());
  return nlohmann::json::parse(in);
}

}  // namespace

TEST_CASE("defaults validate") {
  ExperimentConfig cfg;
  CHECK(cfg.suite == "properties");
  CHECK(cfg.depth1 == 4);
  CHECK(cfg.depth2 == 4);
  CHECK(cfg.weights == "random:0.5,2");
  CHECK_NOTHROW(validate(cfg));
}

TEST_CASE("settings parse compound values") {
  ExperimentConfig cfg;
  apply_setting(cfg, "depth", "3x5");
  CHECK(cfg.depth1 == 3);
  CHECK(cfg.depth2 == 5);
  apply_setting(cfg, "dims", "2x1");
  CHECK(cfg.dim1 == 2);
  CHECK(cfg.dim2 == 1);
  apply_setting(cfg, "seed", "42");
  CHECK(cfg.seed == 42);
  apply_setting(cfg, "weights", "one");
  apply_setting(cfg, "delta", "0.5");
  CHECK(cfg.delta == doctest::Approx(0.5));
  CHECK_THROWS_AS(apply_setting(cfg, "depth", "abc"), ConfigError);
  CHECK_THROWS_AS(apply_setting(cfg, "trials", "many"), ConfigError);
}

TEST_CASE("unknown keys are rejected with the key list") {
  ExperimentConfig cfg;
  try {
    apply_setting(cfg, "depht", "4x4");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    std::string what = e.what();
    CHECK(what.find("depht") != std::string::npos);
    CHECK(what.find("valid keys") != std::string::npos);
  }
}

TEST_CASE("validation rejects out-of-range and inconsistent configs") {
  ExperimentConfig cfg;
  cfg.depth1 = 9;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg.depth1 = 4;
  cfg.suite = "nonsense";
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg.suite = "expansion";
  cfg.depth2 = 5;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg.depth2 = 3;
  CHECK_NOTHROW(validate(cfg));
  cfg.dim1 = 2;
  CHECK_THROWS_AS(validate(cfg), ConfigError);  // operator suites need 1x1
  cfg.suite = "properties";
  CHECK_NOTHROW(validate(cfg));
  cfg.weights = "random:0.5";
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg.weights = "random:1.5,2";
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg.weights = "one";
  cfg.kernel = "cauchy";
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg.kernel = "bicommutator";
  cfg.trials = 0;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg.trials = 1;
  cfg.delta = 0.0;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg.delta = 1.0;
  CHECK_NOTHROW(validate(cfg));
}

TEST_CASE("config files round-trip through emit and parse") {
  ExperimentConfig cfg;
  cfg.suite = "goodness";
  cfg.depth1 = 5;
  cfg.depth2 = 2;
  cfg.seed = 99;
  cfg.weights = "one";
  cfg.r = 3;
  cfg.trials = 7;
  cfg.out_dir = "/tmp/somewhere";
  fs::path dir = temp_dir("roundtrip");
  fs::path file = dir / "cfg.txt";
  {
    std::ofstream out(file);
    out << emit_config(cfg);
  }
  ExperimentConfig back = parse_config(file.string());
  CHECK(emit_config(back) == emit_config(cfg));
  // Comments and blank lines are tolerated.
  {
    std::ofstream out(file);
    out << "# a comment\n\n  suite = atoms  # trailing\n";
  }
  ExperimentConfig sparse = parse_config(file.string());
  CHECK(sparse.suite == "atoms");
  CHECK(sparse.depth1 == 4);  // untouched default
  CHECK_THROWS_AS(parse_config((dir / "missing.txt").string()), ConfigError);
}

TEST_CASE("exit code constants") {
  CHECK(kExitOk == 0);
  CHECK(kExitUsage == 2);
  CHECK(kExitNumeric == 3);
}

TEST_CASE("running a suite writes a summary with metrics and passes") {
  ExperimentConfig cfg;
  cfg.suite = "properties";
  cfg.depth1 = cfg.depth2 = 3;
  cfg.trials = 3;
  cfg.seed = 11;
  fs::path dir = temp_dir("properties");
  cfg.out_dir = dir.string();
  int rc = run_suite(cfg);
  CHECK(rc == 0);
  nlohmann::json summary = read_summary(dir);
  CHECK(summary["suite"] == "properties");
  CHECK(summary["all_pass"] == true);
  CHECK(summary["config"]["suite"] == "properties");
  CHECK(summary.contains("metrics"));
  CHECK(summary.contains("timestamp"));
  CHECK(summary["version"] == "0.1.0");
}

TEST_CASE("identical config and seed reproduce the metrics byte for byte") {
  ExperimentConfig cfg;
  cfg.suite = "atoms";
  cfg.depth1 = cfg.depth2 = 3;
  cfg.trials = 4;
  cfg.seed = 7;
  fs::path d1 = temp_dir("repro1"), d2 = temp_dir("repro2");
  cfg.out_dir = d1.string();
  CHECK(run_suite(cfg) == 0);
  cfg.out_dir = d2.string();
  CHECK(run_suite(cfg) == 0);
  nlohmann::json a = read_summary(d1), b = read_summary(d2);
  CHECK(a["metrics"].dump() == b["metrics"].dump());
  CHECK(a["pass"].dump() == b["pass"].dump());
}

TEST_CASE("suite failure surfaces in the exit status") {
  // The goodness suite is honest: it reports and fails when the Monte-Carlo
  // estimate cannot match a positive exhaustive probability. With r large the
  // witness range is empty, every cube is good, and the suite passes.
  ExperimentConfig cfg;
  cfg.suite = "goodness";
  cfg.depth1 = cfg.depth2 = 4;
  cfg.r = 4;
  cfg.trials = 5;
  fs::path dir = temp_dir("goodness");
  cfg.out_dir = dir.string();
  CHECK(run_suite(cfg) == 0);
  nlohmann::json summary = read_summary(dir);
  CHECK(summary["metrics"]["pi_exhaustive"] == 1.0);
}
