// End-to-end acceptance checks; one PASS/FAIL line per criterion.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lammos/cli.hpp"
#include "lammos/dewalop.hpp"
#include "lammos/exo.hpp"
#include "lammos/latch.hpp"
#include "lammos/mechlib.hpp"
#include "lammos/sequence.hpp"

namespace fs = std::filesystem;
using namespace lammos;

namespace {

const fs::path kScenarios = LAMMOS_SCENARIO_DIR;

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

struct Check {
  std::vector<std::string> failures;
  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

int cli(const std::vector<std::string>& args, std::string* out = nullptr) {
  std::ostringstream o, e;
  const int code = cli::main(args, o, e);
  if (out) *out = o.str();
  return code;
}

// 1. Constants anchored on the hardware tables.
void table_constants(Check& c) {
  const MotorSpec m = MotorSpec::micro_gearmotor_298();
  c.expect(rel(Nm_to_gcm(m.at_voltage(3.0).stall_torque_Nm), 2884.0) <= 1e-12, "stall torque at 3 V");
  c.expect(rel(Nm_to_gcm(m.at_voltage(6.0).stall_torque_Nm), 3444.0) <= 1e-12, "stall torque at 6 V");
  c.expect(SpringSpec::lammos_default().max_load_N == 4.506, "spring max load");
  c.expect(check_tslot_holding(5000.0).passed && !check_tslot_holding(std::nextafter(5000.0, 6000.0)).passed,
           "t-slot limit inclusive at 5000 N");
  struct Row {
    BracketSpec b;
    double f, m;
  };
  for (const Row& r : {Row{BracketSpec::angle_40x40(), 1000, 50}, Row{BracketSpec::angle_80x80(), 2000, 150},
                       Row{BracketSpec::angle_160x80(), 2000, 150}}) {
    c.expect(r.b.max_force_N == r.f && r.b.max_moment_Nm == r.m, "bracket envelope values");
    c.expect(!check_bracket_load(r.b, r.f, 0.001).passed, "force limit strict");
    c.expect(check_bracket_load(r.b, std::nextafter(r.f, 0.0), 0.001).passed, "just under force limit");
    c.expect(!check_bracket_load(r.b, r.m, 1.0).passed, "moment limit strict");
  }
}

// 2. Bracket check against an integer-arithmetic grid oracle.
void bracket_oracle(Check& c) {
  struct Row {
    BracketSpec b;
    std::int64_t f_N, m_Nmm;
  };
  const Row rows[] = {{BracketSpec::angle_40x40(), 1000, 50000},
                      {BracketSpec::angle_80x80(), 2000, 150000},
                      {BracketSpec::angle_160x80(), 2000, 150000}};
  std::size_t pairs = 0, disagree = 0;
  for (const Row& r : rows) {
    for (std::int64_t f = 0; f <= 3000; f += 20) {
      for (std::int64_t l = 0; l <= 240; l += 7) {
        const bool oracle = f < r.f_N && f * l < r.m_Nmm;
        ++pairs;
        if (check_bracket_load(r.b, static_cast<double>(f), static_cast<double>(l) / 1000.0).passed != oracle) {
          ++disagree;
        }
      }
    }
  }
  c.expect(pairs >= 15000, "grid covers 15000 pairs (" + std::to_string(pairs) + ")");
  c.expect(disagree == 0, std::to_string(disagree) + " disagreements");
}

// 3. Plate safety factors from the CLI against beam theory.
void safety_factor_study(Check& c) {
  std::string out;
  c.expect(cli({"sf", "--load", "1000", "1500", "2000"}, &out) == 0, "sf exit code");
  std::istringstream is(out);
  std::string line;
  std::vector<double> sf;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'l') continue;
    sf.push_back(std::stod(line.substr(line.rfind(',') + 1)));
  }
  if (sf.size() != 3) {
    c.expect(false, "expected three rows");
    return;
  }
  const double z = 0.009 * 0.040 * 0.040 / 6.0;
  const double loads[] = {1000.0, 1500.0, 2000.0};
  for (int i = 0; i < 3; ++i) {
    c.expect(rel(sf[i], 250e6 / (loads[i] * 0.116 / z)) <= 1e-9, "SF matches oracle");
  }
  c.expect(sf[0] > sf[1] && sf[1] > sf[2], "SF strictly decreasing");
  c.expect(sf[2] == sf[0] / 2.0, "printed SF(2000) = SF(1000)/2");
  const auto plate = PlateSpec::flat_bracket_plate();
  const auto steel = MaterialSpec::mild_steel();
  c.expect(plate_bending_safety_factor(plate, steel, 2000.0, 0.116).safety_factor ==
               plate_bending_safety_factor(plate, steel, 1000.0, 0.116).safety_factor / 2.0,
           "SF(2000) = SF(1000)/2 exactly");
  c.expect(std::fabs(sf[0] - 5.17) < 0.005, "SF(1000) near 5.17");
}

// 4. Latch state machine properties.
void latch_properties(Check& c) {
  using namespace latch;
  const LatchFsm housed;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> dur(0.001, 0.3);
  std::uniform_real_distribution<double> volt(3.0, 6.0);
  std::uniform_int_distribution<int> len(1, 8);
  std::uniform_int_distribution<int> kind(0, 2);
  for (int i = 0; i < 10000; ++i) {
    std::vector<ScheduleEntry> s;
    for (int n = len(rng); n > 0; --n) {
      s.push_back({kind(rng) == 0 ? DriveCommand::counterclockwise(volt(rng)) : DriveCommand::off(), dur(rng)});
    }
    const auto sim = simulate(housed, s, 0.01);
    bool ok = sim.final.state() == LatchState::Housed;
    for (const auto& x : sim.trace.samples) ok = ok && x.state == LatchState::Housed;
    if (!ok) {
      c.expect(false, "idle schedule " + std::to_string(i) + " left Housed");
      break;
    }
  }

  std::uniform_real_distribution<double> long_dur(0.05, 15.0);
  std::size_t illegal = 0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<ScheduleEntry> s;
    for (int n = len(rng) * 3; n > 0; --n) {
      const int k = kind(rng);
      const double v = volt(rng);
      s.push_back({k == 0 ? DriveCommand::off() : k == 1 ? DriveCommand::clockwise(v) : DriveCommand::counterclockwise(v),
                   long_dur(rng)});
    }
    illegal += audit_transitions(simulate(housed, s, 0.05).trace, housed.state()).size();
  }
  c.expect(illegal == 0, std::to_string(illegal) + " illegal transitions in random drive schedules");

  const auto in = actuate(housed, DriveCommand::clockwise(3.0), 0.01);
  const auto out = actuate(in.final, DriveCommand::counterclockwise(6.0), 0.01, in.trace.samples.back().t_s);
  const auto& u = out.trace.samples;
  if (u.empty()) {
    c.expect(false, "unlatch produced no samples");
    return;
  }
  const auto peak = std::max_element(u.begin(), u.end(), [](auto& a, auto& b) { return a.current_A < b.current_A; });
  c.expect(peak->state == LatchState::Loosening && peak == u.begin(), "breakaway current is the unlatch maximum");
  std::vector<LatchState> runs{housed.state()};
  for (const auto* tr : {&in.trace, &out.trace}) {
    for (const auto& x : tr->samples) {
      if (x.state != runs.back()) runs.push_back(x.state);
    }
  }
  const std::vector<LatchState> cycle{LatchState::Housed,    LatchState::EngagingFlexNut, LatchState::Traversing,
                                      LatchState::Tightening, LatchState::Latched,        LatchState::Loosening,
                                      LatchState::Retracting, LatchState::Housed};
  c.expect(runs == cycle, "state sequence is the seven-state cycle");
}

// 5. Insertion clearance and push force.
void insertion_numbers(Check& c) {
  const auto unit = dewalop::MaintenanceUnit::make();
  const dewalop::PipeEnvironment pipe{0.800};
  c.expect(dewalop::insertion_clearance(unit, pipe, true) == 0.116, "lowered clearance 0.116 m");
  c.expect(dewalop::insertion_clearance(unit, pipe, false) == -0.030, "raised clearance -0.030 m");
  c.expect(dewalop::insertion_force_required(unit, pipe, false) == 400.0, "raised push 400 N");
}

// 6. Canonical five-step insertion and the resulting load path.
void five_step_scenario(Check& c) {
  const auto r = sequence::run_scenario(sequence::canonical_insertion());
  c.expect(r.verdict.success, "canonical scenario: " + r.verdict.describe());
  for (const auto& leg : r.final.legs) {
    const auto p = dewalop::leg_load_path(leg, 2000.0);
    c.expect(p.actuator_share_N == 0.0 && p.structure_share_N == 2000.0, "structure carries 2000 N");
    c.expect(p.passed && p.bracket && p.bracket->passed && p.tslot && p.tslot->passed && p.plate &&
                 !p.plate->failed(),
             "structural verdicts pass at 2000 N");
  }
  auto housed_leg = r.final.legs[0];
  housed_leg.flat_latch = latch::LatchFsm(housed_leg.flat_latch.config());
  const auto p = dewalop::leg_load_path(housed_leg, 2000.0);
  c.expect(!p.passed && std::find(p.failures.begin(), p.failures.end(), "actuator overload") != p.failures.end(),
           "housed flat latch flags actuator overload");
  const auto again = sequence::run_scenario(sequence::canonical_insertion());
  c.expect(again.log == r.log && again.final == r.final, "deterministic rerun");
}

// 7. Forward then inverse restores the robot.
void round_trip(Check& c) {
  const auto fwd = sequence::canonical_insertion();
  const auto a = sequence::run_scenario(fwd);
  sequence::Scenario back = fwd;
  back.robot = a.final;
  back.steps = sequence::inverse_steps(fwd.steps);
  const auto b = sequence::run_scenario(back);
  c.expect(a.verdict.success && b.verdict.success, "both directions succeed");
  c.expect(b.final == fwd.robot, "robot state equals the initial state field for field");
}

// 8. No power draw at rest.
void static_power(Check& c) {
  using namespace latch;
  const LatchFsm housed;
  const auto in = actuate(housed, DriveCommand::clockwise(3.0), 0.01);
  const auto out = actuate(in.final, DriveCommand::counterclockwise(6.0), 0.01);
  std::vector<LatchFsm> snapshots{housed};
  for (const auto* sim : {&in, &out}) {
    for (const auto& e : sim->events) snapshots.push_back(e.fsm);
  }
  std::vector<LatchState> seen;
  for (const auto& s : snapshots) {
    const auto rest = step(s, DriveCommand::off(), 0.01).fsm;
    c.expect(latch::static_power(rest) == 0.0, "unpowered " + std::string(to_string(s.state())));
    seen.push_back(rest.state());
  }
  std::sort(seen.begin(), seen.end());
  c.expect(std::unique(seen.begin(), seen.end()) - seen.begin() == 7, "all seven states checked");

  exo::ExoJoint joint;
  joint.lock = in.final;
  for (double load : {0.0, 0.05, 0.2, 0.33, 10.0}) {
    joint.load_torque_Nm = load;
    c.expect(exo::hold_power(joint) == joint.standby_power_W, "locked joint draws standby only");
  }
}

// 9. Energy comparison against the closed form.
void energy(Check& c) {
  const exo::ExoJoint joint;
  const double half = gcm_to_Nm(3444.0) / 2.0;
  const auto cmp = exo::energy_comparison(joint, exo::LoadTimeline::constant(half, 600.0), 0.0);
  const double power = 6.0 * (0.04 + (1.6 - 0.04) * 0.5);
  const double oracle = (power - joint.standby_power_W) * 600.0 - exo::latch_energy(joint);
  c.expect(rel(cmp.savings_J, oracle) <= 1e-9, "600 s half-stall savings");
  const auto late = exo::energy_comparison(joint, exo::LoadTimeline::constant(half, 600.0), 600.0);
  c.expect(late.savings_J == -exo::latch_energy(joint), "locking at the end costs exactly the latch energy");
}

// 10. Byte-identical outputs across reruns.
void determinism(Check& c) {
  const fs::path root = fs::temp_directory_path() / "lammos_acceptance";
  fs::remove_all(root);
  for (const char* name : {"canonical_insertion", "round_trip", "broken_ordering", "exo_hold", "latch_fuzz"}) {
    const auto cfg = (kScenarios / (std::string(name) + ".json")).string();
    const fs::path a = root / name / "a";
    const fs::path b = root / name / "b";
    const int ca = cli({"run", "--config", cfg, "--out", a.string(), "--seed", "3"});
    const int cb = cli({"run", "--config", cfg, "--out", b.string(), "--seed", "3"});
    c.expect(ca == cb && ca != 2, std::string(name) + " exit codes");
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(a)) {
      ++files;
      c.expect(slurp(e.path()) == slurp(b / e.path().filename()),
               std::string(name) + "/" + e.path().filename().string() + " differs");
    }
    c.expect(files >= 2, std::string(name) + " wrote artifacts");
  }
  fs::remove_all(root);
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria{
      {"table-anchored constants", table_constants},
      {"bracket check matches grid oracle", bracket_oracle},
      {"plate safety-factor study", safety_factor_study},
      {"latch state machine properties", latch_properties},
      {"insertion clearance and force", insertion_numbers},
      {"five-step insertion and load path", five_step_scenario},
      {"round trip restores the robot", round_trip},
      {"zero static power", static_power},
      {"energy comparison", energy},
      {"byte-identical reruns", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    try {
      criteria[i].second(c);
    } catch (const std::exception& e) {
      c.failures.push_back(std::string("exception: ") + e.what());
    }
    if (i + 1 == criteria.size()) {
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      c.expect(secs < 30.0, "suite took " + std::to_string(secs) + " s");
    }
    std::cout << (c.failures.empty() ? "PASS" : "FAIL") << "  criterion " << (i + 1) << ": " << criteria[i].first;
    if (!c.failures.empty()) std::cout << " (" << c.failures.front() << ")";
    std::cout << '\n';
    failed += c.failures.empty() ? 0 : 1;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
