#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#ifndef COHORTLAB_BIN
#error "COHORTLAB_BIN must point at the cohortlab executable"
#endif

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(COHORTLAB_BIN) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("cohortlab_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("unknown flags exit 1 and leave no partial outputs") {
  const auto dir = fresh_dir("usage");
  CHECK(run("synth --preset paper --seed 1 --definitely-not-a-flag --out " + dir.string()) == 1);
  CHECK_FALSE(fs::exists(dir / "students.csv"));
  CHECK(run("frobnicate") == 1);
  CHECK(run("") == 1);  // missing subcommand
}

TEST_CASE("seed is mandatory for stochastic subcommands") {
  const auto dir = fresh_dir("seed");
  CHECK(run("synth --preset null --out " + dir.string()) == 1);
}

TEST_CASE("unknown preset names are contract errors") {
  const auto dir = fresh_dir("preset");
  CHECK(run("synth --preset nonsense --seed 1 --out " + dir.string()) == 2);
  CHECK(run("solve --preset nonsense --out " + dir.string()) == 2);
}

TEST_CASE("outputs are never overwritten without --force") {
  const auto dir = fresh_dir("force");
  const std::string small = " --spec " + (dir / "cfg.json").string();
  std::ofstream(dir / "cfg.json")
      << R"({"preset":"null","calibration":{"n_degrees":8}})";
  REQUIRE(run("synth --seed 1 --out " + dir.string() + small) == 0);
  const auto before = slurp(dir / "students.csv");
  CHECK(run("synth --seed 2 --out " + dir.string() + small) == 1);
  CHECK(slurp(dir / "students.csv") == before);  // untouched
  CHECK(run("synth --seed 2 --force --out " + dir.string() + small) == 0);
  CHECK(slurp(dir / "students.csv") != before);
}

TEST_CASE("same config and seed produce byte-identical artifacts") {
  const auto a = fresh_dir("detA");
  const auto b = fresh_dir("detB");
  std::ofstream(a / "cfg.json") << R"({"preset":"paper","calibration":{"n_degrees":12}})";
  std::ofstream(b / "cfg.json") << R"({"preset":"paper","calibration":{"n_degrees":12}})";
  REQUIRE(run("synth --seed 42 --out " + a.string() + " --spec " + (a / "cfg.json").string()) ==
          0);
  REQUIRE(run("synth --seed 42 --out " + b.string() + " --spec " + (b / "cfg.json").string()) ==
          0);
  CHECK(slurp(a / "students.csv") == slurp(b / "students.csv"));
  CHECK(slurp(a / "provinces.csv") == slurp(b / "provinces.csv"));
  CHECK(slurp(a / "truth.json") == slurp(b / "truth.json"));

  REQUIRE(run("exposures --out " + a.string()) == 0);
  REQUIRE(run("exposures --out " + b.string()) == 0);
  CHECK(slurp(a / "exposures.csv") == slurp(b / "exposures.csv"));

  REQUIRE(run("permute --seed 9 --draws 20 --threads 1 --out " + a.string()) == 0);
  REQUIRE(run("permute --seed 9 --draws 20 --threads 2 --out " + b.string()) == 0);
  CHECK(slurp(a / "permutation.json") == slurp(b / "permutation.json"));

  // the downstream steps read the artifacts and stay deterministic too
  REQUIRE(run("diagnose --out " + a.string()) == 0);
  REQUIRE(run("diagnose --out " + b.string()) == 0);
  CHECK(slurp(a / "residual_variation.json") == slurp(b / "residual_variation.json"));
  CHECK(slurp(a / "flags.json") == slurp(b / "flags.json"));
  REQUIRE(run("fit --preset table6 --out " + a.string()) == 0);
  REQUIRE(run("fit --preset table6 --out " + b.string()) == 0);
  CHECK(slurp(a / "fit_table6.csv") == slurp(b / "fit_table6.csv"));
  REQUIRE(run("report --out " + a.string()) == 0);
  CHECK(fs::exists(a / "report.md"));
}

TEST_CASE("missing inputs are contract errors") {
  const auto dir = fresh_dir("missing");
  CHECK(run("exposures --out " + dir.string()) == 2);
  CHECK(run("diagnose --out " + dir.string()) == 2);
  CHECK(run("fit --out " + dir.string()) == 2);
}

TEST_CASE("report validates artifact schemas and refuses corrupted inputs") {
  const auto dir = fresh_dir("schema");
  std::ofstream(dir / "solve.json") << R"({"schema":"cohortlab/wrong/v1"})";
  CHECK(run("report --out " + dir.string()) == 2);
  CHECK_FALSE(fs::exists(dir / "report.json"));
}

TEST_CASE("solve and report run end to end on the elicited-beliefs preset") {
  const auto dir = fresh_dir("solve_report");
  REQUIRE(run("solve --preset table9 --out " + dir.string()) == 0);
  REQUIRE(run("report --out " + dir.string()) == 0);
  const std::string md = slurp(dir / "report.md");
  CHECK(md.find("Belief gap") != std::string::npos);
  CHECK(md.find("offers_out_of_10 / 10") != std::string::npos);
}

TEST_CASE("fit presets for the robustness specifications all run") {
  const auto dir = fresh_dir("presets");
  std::ofstream(dir / "cfg.json") << R"({"preset":"paper","calibration":{"n_degrees":40}})";
  REQUIRE(run("synth --seed 5 --out " + dir.string() + " --spec " +
              (dir / "cfg.json").string()) == 0);
  for (const char* preset : {"table6", "table6_degree_trends", "table6_region_trends",
                             "table6_province_fe", "table6_no_size_trends", "table6_male"}) {
    CAPTURE(preset);
    CHECK(run("fit --preset " + std::string(preset) + " --force --out " + dir.string()) == 0);
    CHECK(fs::exists(dir / ("fit_" + std::string(preset) + ".csv")));
  }
  // shock-severity filtered sample via a spec file
  std::ofstream(dir / "shock.json") << R"({
    "preset": "table6", "name": "table6_low_shock", "outcomes": ["log_earnings"],
    "shock_filter": {"characteristic": "mean_ability", "keep_fraction": 0.75}
  })";
  CHECK(run("fit --spec " + (dir / "shock.json").string() + " --force --out " + dir.string()) ==
        0);
  CHECK(fs::exists(dir / "fit_table6_low_shock.csv"));
}

TEST_CASE("mover pipeline: synth mover preset feeds the Q4 specification") {
  const auto dir = fresh_dir("mover");
  std::ofstream(dir / "cfg.json") << R"({"preset":"mover","calibration":{"n_degrees":60}})";
  REQUIRE(run("synth --seed 6 --out " + dir.string() + " --spec " +
              (dir / "cfg.json").string()) == 0);
  CHECK(run("fit --preset table3_movers --out " + dir.string()) == 0);
  CHECK(fs::exists(dir / "fit_table3_movers.csv"));
  // the Q4 preset needs mover columns: it is a contract error on a base panel
  const auto plain = fresh_dir("mover_plain");
  std::ofstream(plain / "cfg.json") << R"({"preset":"null","calibration":{"n_degrees":20}})";
  REQUIRE(run("synth --seed 6 --out " + plain.string() + " --spec " +
              (plain / "cfg.json").string()) == 0);
  CHECK(run("fit --preset table3_movers --out " + plain.string()) == 2);
}

TEST_CASE("numerical failures exit 3") {
  const auto dir = fresh_dir("numerical");
  std::ofstream(dir / "env.json") << R"({
    "preset": "table9",
    "env": {"beta": 0.9, "b": 2.5, "theta": 0.5,
            "wage_dist": {"family": "uniform", "min": 1.0, "max": 2.0}}
  })";
  // b above the wage ceiling: every spell exceeds the duration cap
  CHECK(run("spells --seed 1 --draws 2 --out " + dir.string() + " --spec " +
            (dir / "env.json").string()) == 3);
}
