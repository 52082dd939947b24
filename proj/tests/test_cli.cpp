#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "fracfast/errors.hpp"

using namespace fracbench;

TEST_CASE("sweep syntax") {
  const auto powers = parse_sweep("2^-5..2^-9");
  REQUIRE(powers.size() == 5);
  CHECK(powers[0] == std::ldexp(1.0, -5));
  CHECK(powers[4] == std::ldexp(1.0, -9));
  CHECK(parse_sweep("1..4") == std::vector<double>{1, 2, 3, 4});
  CHECK(parse_sweep("3..1") == std::vector<double>{3, 2, 1});
  CHECK(parse_sweep("1e-10, 1e-8,1e-6") == std::vector<double>{1e-10, 1e-8, 1e-6});
  CHECK(parse_sweep("2^-5,0.5,10") == std::vector<double>{1.0 / 32, 0.5, 10});
  CHECK(parse_sweep("-0.5") == std::vector<double>{-0.5});
  CHECK_THROWS_AS(parse_sweep(""), UsageError);
  CHECK_THROWS_AS(parse_sweep("1,,2"), UsageError);
  CHECK_THROWS_AS(parse_sweep("abc"), UsageError);
  CHECK_THROWS_AS(parse_sweep("2^-5..3^-7"), UsageError);
  CHECK_THROWS_AS(parse_sweep("0.5..2"), UsageError);
}

TEST_CASE("config text") {
  const auto kv = parse_config_text("# comment\nalpha = 0.8\n\n--tau=2^-5..2^-6  # trailing\n");
  CHECK(kv.at("alpha") == "0.8");
  CHECK(kv.at("tau") == "2^-5..2^-6");
  CHECK_THROWS_AS(parse_config_text("alpha 0.8\n"), UsageError);
}

TEST_CASE("flags and config files") {
  const auto inv = parse_arguments({"convergence", "--alpha", "0.8", "--m", "3", "--tau",
                                    "2^-5..2^-9", "--interp", "linear", "--mode", "direct"});
  CHECK(inv.config.name == "convergence");
  CHECK(inv.config.tau.size() == 5);
  CHECK(inv.config.m == std::vector<double>{3});
  CHECK(inv.config.kind == fracfast::InterpKind::Linear);
  CHECK(inv.config.mode == fracfast::OperatorMode::Direct);

  const auto path = std::filesystem::temp_directory_path() / "fracbench_test.cfg";
  {
    std::ofstream os(path);
    os << "alpha=0.3\nB=2,5\nout=/tmp/from_file\n";
  }
  const auto merged = parse_arguments({"gap", "--config", path.string(), "--alpha", "0.1"});
  CHECK(merged.config.alpha == std::vector<double>{0.1});
  CHECK(merged.config.B == std::vector<double>{2, 5});
  CHECK(merged.out_dir == "/tmp/from_file");
  std::filesystem::remove(path);

  CHECK_THROWS_AS(parse_arguments({}), UsageError);
  CHECK_THROWS_AS(parse_arguments({"nosuch"}), UsageError);
  CHECK_THROWS_AS(parse_arguments({"gap", "--tau", ""}), UsageError);
  CHECK_THROWS_AS(parse_arguments({"gap", "--interp", "cubic"}), UsageError);
  CHECK_THROWS_AS(parse_arguments({"gap", "--bogus", "1"}), UsageError);
  CHECK_THROWS_AS(parse_arguments({"gap", "--config", "/nonexistent/x.cfg"}), UsageError);
  CHECK(parse_arguments({"--help"}).help);
}

TEST_CASE("reports are deterministic and use full precision") {
  fracfast::ExperimentConfig c;
  c.name = "rule-dump";
  c.alpha = {0.5};
  c.N = 6;
  const auto a = fracfast::run_experiment(c);
  const auto b = fracfast::run_experiment(c);
  REQUIRE(a.results.size() == b.results.size());
  CHECK(a.results[0].rows == b.results[0].rows);
  CHECK(a.results[0].columns == std::vector<std::string>{"j", "node", "weight"});
  CHECK(fracfast::format_real(0.1) == "0.10000000000000001");

  c.name = "gap";
  c.alpha = {0.1};
  c.tau = {1.0 / 32};
  c.eps = {1e-10, 1e-6};
  c.T = {4};
  c.threads = 2;
  const auto g1 = fracfast::run_experiment(c);
  c.threads = 1;
  const auto g2 = fracfast::run_experiment(c);
  CHECK(g1.results[0].rows == g2.results[0].rows);
  CHECK(g1.results[0].rows.size() == 2);

  c.name = "nosuch";
  CHECK_THROWS_AS(fracfast::run_experiment(c), fracfast::DomainError);
}
