#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lammos/cli.hpp"
#include "lammos/config.hpp"
#include "lammos/errors.hpp"

namespace fs = std::filesystem;
using lammos::cli::main;

namespace {

const fs::path kScenarios = LAMMOS_SCENARIO_DIR;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = main(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("lammos_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace

TEST(CliRun, CanonicalInsertionWritesArtifacts) {
  const fs::path out = scratch("canonical");
  const auto r = run({"run", "--config", (kScenarios / "canonical_insertion.json").string(), "--out", out.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  for (const char* f : {"trace.csv", "log.csv", "report.txt", "legs.csv"}) EXPECT_TRUE(fs::exists(out / f)) << f;
  EXPECT_EQ(slurp(out / "trace.csv").rfind("t_s,current_A,position_m,state\n", 0), 0u);
}

TEST(CliRun, EmitSelectsArtifacts) {
  const fs::path out = scratch("emit");
  const auto r = run({"run", "--config", (kScenarios / "canonical_insertion.json").string(), "--out", out.string(),
                      "--emit", "log"});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(fs::exists(out / "log.csv"));
  EXPECT_FALSE(fs::exists(out / "trace.csv"));
  EXPECT_EQ(run({"run", "--config", (kScenarios / "canonical_insertion.json").string(), "--out", out.string(),
                 "--emit", "video"})
                .code,
            2);
}

TEST(CliRun, BrokenOrderingExitsOneAndNamesThePrecondition) {
  const fs::path out = scratch("broken");
  const auto r = run({"run", "--config", (kScenarios / "broken_ordering.json").string(), "--out", out.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(slurp(out / "report.txt").find("hinge not perpendicular"), std::string::npos);
}

TEST(CliRun, UsageErrorsExitTwo) {
  const fs::path out = scratch("usage");
  EXPECT_EQ(run({"run", "--config", "/nonexistent/scenario.json", "--out", out.string()}).code, 2);
  EXPECT_EQ(run({"run", "--out", out.string()}).code, 2);
  EXPECT_EQ(run({"run", "--config", (kScenarios / "canonical_insertion.json").string(), "--out", out.string(),
                 "--dt", "0"})
                .code,
            2);
  EXPECT_EQ(run({"run", "--config", (kScenarios / "pipe_1200.json").string(), "--out", out.string()}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"launch"}).code, 2);
}

TEST(CliRun, ExoScenarioWritesComparison) {
  const fs::path out = scratch("exo");
  const auto r = run({"run", "--config", (kScenarios / "exo_hold.json").string(), "--out", out.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(out / "comparison.csv"));
  EXPECT_NE(slurp(out / "report.txt").find("savings"), std::string::npos);
}

TEST(CliRun, FuzzScenarioIsSeeded) {
  const fs::path a = scratch("fuzz_a");
  const fs::path b = scratch("fuzz_b");
  const fs::path c = scratch("fuzz_c");
  const auto cfg = (kScenarios / "latch_fuzz.json").string();
  EXPECT_EQ(run({"run", "--config", cfg, "--out", a.string(), "--seed", "11"}).code, 0);
  EXPECT_EQ(run({"run", "--config", cfg, "--out", b.string(), "--seed", "11"}).code, 0);
  EXPECT_EQ(run({"run", "--config", cfg, "--out", c.string(), "--seed", "12"}).code, 0);
  EXPECT_EQ(slurp(a / "trace.csv"), slurp(b / "trace.csv"));
  EXPECT_NE(slurp(a / "trace.csv"), slurp(c / "trace.csv"));
  EXPECT_NE(slurp(a / "report.txt").find("illegal transitions: 0"), std::string::npos);
}

TEST(CliRun, RerunsAreByteIdentical) {
  for (const char* name : {"canonical_insertion.json", "round_trip.json", "broken_ordering.json", "exo_hold.json"}) {
    const fs::path a = scratch(std::string("det_a_") + name);
    const fs::path b = scratch(std::string("det_b_") + name);
    const auto cfg = (kScenarios / name).string();
    const int ca = run({"run", "--config", cfg, "--out", a.string()}).code;
    const int cb = run({"run", "--config", cfg, "--out", b.string()}).code;
    EXPECT_EQ(ca, cb);
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(a)) {
      ++files;
      EXPECT_EQ(slurp(entry.path()), slurp(b / entry.path().filename())) << name << " " << entry.path().filename();
    }
    EXPECT_GE(files, 3u) << name;
  }
}

TEST(CliCheck, ExitCodes) {
  EXPECT_EQ(run({"check", (kScenarios / "canonical_insertion.json").string()}).code, 0);
  const auto bad = run({"check", (kScenarios / "pipe_1200.json").string()});
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.out.find("pipe out of operating range"), std::string::npos);
  const fs::path junk = scratch("junk.json");
  std::ofstream(junk) << "{ this is not json";
  EXPECT_EQ(run({"check", junk.string()}).code, 2);
  EXPECT_EQ(run({"check", "/nonexistent.json"}).code, 2);
}

TEST(CliSf, ThreeLoadStudy) {
  const auto r = run({"sf", "--load", "1000", "1500", "2000"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream is(r.out);
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line[0], '#');
  std::getline(is, line);
  EXPECT_EQ(line, "load_N,stress_Pa,safety_factor");
  std::vector<double> sf;
  while (std::getline(is, line)) sf.push_back(std::stod(line.substr(line.rfind(',') + 1)));
  ASSERT_EQ(sf.size(), 3u);
  EXPECT_GT(sf[0], sf[1]);
  EXPECT_GT(sf[1], sf[2]);
  EXPECT_NEAR(sf[0], 5.1724137931, 1e-9);
  EXPECT_NEAR(sf[2], sf[0] / 2.0, 1e-10);
}

TEST(CliSf, OptionsAndErrors) {
  EXPECT_EQ(run({"sf", "--load", "0"}).code, 2);
  EXPECT_EQ(run({"sf", "--load", "-5"}).code, 2);
  EXPECT_EQ(run({"sf", "--load", "100", "--plate", "116,40"}).code, 2);
  EXPECT_EQ(run({"sf", "--load", "100", "--plate", "a,b,c"}).code, 2);
  const auto custom = run({"sf", "--load", "1000", "--yield", "500e6", "--lever", "0.058"});
  ASSERT_EQ(custom.code, 0);
  EXPECT_NE(custom.out.find(",20.6896551724"), std::string::npos) << custom.out;
}

TEST(CliDefaults, PrintsParsableJson) {
  const auto r = run({"defaults"});
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j.contains("mechanism"));
  EXPECT_TRUE(j.contains("not_measured"));
  EXPECT_NEAR(j["mechanism"]["motor"]["anchors"][0]["stall_torque_gcm"].get<double>(), 2884.0, 1e-9);
}

TEST(Config, ParsesUnitsInKeyNames) {
  const auto doc = lammos::config::parse_scenario(R"({
    "type": "dewalop", "pipe": {"inner_diameter_mm": 900},
    "mechanism": {"latch": {"tslot_gap_mm": 3}},
    "steps": [{"action": "lower_legs", "angle_deg": 45}]
  })");
  EXPECT_EQ(doc.kind, lammos::config::ScenarioKind::Dewalop);
  EXPECT_DOUBLE_EQ(doc.dewalop.pipe.inner_diameter_m, 0.9);
  EXPECT_DOUBLE_EQ(doc.dewalop.robot.legs[0].angle_latch.config().tslot_gap_m, 0.003);
  ASSERT_EQ(doc.dewalop.steps.size(), 1u);
  EXPECT_NEAR(*doc.dewalop.steps[0].angle_rad, lammos::kPi / 4.0, 1e-15);
  EXPECT_THROW(lammos::config::parse_scenario(R"({"type": "submarine"})"), lammos::config::ParseError);
  EXPECT_THROW(lammos::config::parse_scenario(R"({"pipe": {"inner_diameter_mm": "big"}})"),
               lammos::config::ParseError);
}
