#include "lammos/sequence.hpp"

#include <array>
#include <cstdio>
#include <utility>

#include "lammos/errors.hpp"
#include "lammos/format.hpp"

namespace lammos::sequence {

namespace {

constexpr std::array<std::pair<Action, std::string_view>, 10> kActionTags{{
    {Action::LowerLegs, "lower_legs"},
    {Action::MoveIntoPipe, "move_into_pipe"},
    {Action::RaiseLegs, "raise_legs"},
    {Action::LatchAngle, "latch_angle"},
    {Action::ExtendLegs, "extend_legs"},
    {Action::LatchFlat, "latch_flat"},
    {Action::UnlatchFlat, "unlatch_flat"},
    {Action::RetractLegs, "retract_legs"},
    {Action::UnlatchAngle, "unlatch_angle"},
    {Action::ExitPipe, "exit_pipe"},
}};

// A violated pre- or postcondition.
struct StepFailure {
  std::string condition;
  std::optional<int> leg;
};

using dewalop::MaintenanceUnit;
using dewalop::WheeledLeg;
using latch::LatchState;

}  // namespace

std::string_view to_string(Action action) {
  for (const auto& [a, tag] : kActionTags) {
    if (a == action) return tag;
  }
  return "unknown";
}

Action parse_action(std::string_view tag) {
  for (const auto& [a, t] : kActionTags) {
    if (t == tag) return a;
  }
  return Action::Unknown;
}

Action inverse(Action action) {
  switch (action) {
    case Action::LowerLegs: return Action::RaiseLegs;
    case Action::RaiseLegs: return Action::LowerLegs;
    case Action::MoveIntoPipe: return Action::ExitPipe;
    case Action::ExitPipe: return Action::MoveIntoPipe;
    case Action::LatchAngle: return Action::UnlatchAngle;
    case Action::UnlatchAngle: return Action::LatchAngle;
    case Action::ExtendLegs: return Action::RetractLegs;
    case Action::RetractLegs: return Action::ExtendLegs;
    case Action::LatchFlat: return Action::UnlatchFlat;
    case Action::UnlatchFlat: return Action::LatchFlat;
    case Action::Unknown: return Action::Unknown;
  }
  return Action::Unknown;
}

StepSpec StepSpec::of(Action action) {
  StepSpec s;
  s.action = action;
  s.tag = std::string(to_string(action));
  return s;
}

std::vector<StepSpec> canonical_forward_steps() {
  return {StepSpec::of(Action::LowerLegs),  StepSpec::of(Action::MoveIntoPipe),
          StepSpec::of(Action::RaiseLegs),  StepSpec::of(Action::LatchAngle),
          StepSpec::of(Action::ExtendLegs), StepSpec::of(Action::LatchFlat)};
}

std::vector<StepSpec> canonical_reverse_steps() {
  return {StepSpec::of(Action::UnlatchFlat), StepSpec::of(Action::RetractLegs),
          StepSpec::of(Action::UnlatchAngle), StepSpec::of(Action::LowerLegs),
          StepSpec::of(Action::ExitPipe)};
}

std::vector<StepSpec> inverse_steps(const std::vector<StepSpec>& steps) {
  std::vector<StepSpec> out;
  out.reserve(steps.size());
  for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
    StepSpec s = StepSpec::of(inverse(it->action));
    s.acknowledge_push = it->acknowledge_push;
    out.push_back(std::move(s));
  }
  return out;
}

Scenario canonical_insertion(double pipe_diameter_m, double dt_s) {
  Scenario s;
  s.name = "canonical-insertion";
  s.pipe.inner_diameter_m = pipe_diameter_m;
  s.steps = canonical_forward_steps();
  s.dt_s = dt_s;
  return s;
}

// -----------------------------
// Event log
// -----------------------------
void EventLog::append(double t_s, std::string actor, std::string event, std::string hash) {
  if (!entries_.empty() && t_s < entries_.back().t_s) {
    throw StateError("event log: timestamps must be non-decreasing");
  }
  entries_.push_back({t_s, std::move(actor), std::move(event), std::move(hash)});
}

std::string snapshot_hash(const MaintenanceUnit& unit) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : dewalop::canonical_serialize(unit)) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string Verdict::describe() const {
  if (success) return "success";
  std::string out = "failed";
  if (failed_step) out += " at step " + std::to_string(*failed_step + 1) + " (" + action + ")";
  out += ": " + condition;
  if (leg) out += " [leg " + std::to_string(*leg) + "]";
  return out;
}

// -----------------------------
// Validation
// -----------------------------
std::vector<std::string> validate(const Scenario& s) {
  std::vector<std::string> diags;
  if (s.steps.empty()) diags.emplace_back("scenario has no steps");
  if (!(s.dt_s > 0.0)) diags.emplace_back("non-positive timestep");
  if (!s.pipe.in_operating_range()) {
    diags.push_back("pipe out of operating range: " + format_g(s.pipe.inner_diameter_m * 1000.0) +
                    " mm not in [800, 1000] mm");
  }
  if (!(s.actuation_timeout_s > 0.0)) diags.emplace_back("non-positive actuation timeout");

  const MotorSpec* motor = nullptr;
  try {
    s.robot.validate();
    motor = &s.robot.legs.front().angle_latch.config().motor;
  } catch (const Error& e) {
    diags.emplace_back(e.what());
  }
  auto check_voltage = [&](double v, const std::string& where) {
    if (motor && !(v >= motor->min_voltage_V() && v <= motor->max_voltage_V())) {
      diags.push_back(where + ": voltage " + format_g(v) + " V outside motor range [" +
                      format_g(motor->min_voltage_V()) + ", " + format_g(motor->max_voltage_V()) + "] V");
    }
  };
  check_voltage(s.latch_voltage_V, "latch voltage");
  check_voltage(s.unlatch_voltage_V, "unlatch voltage");

  for (std::size_t i = 0; i < s.steps.size(); ++i) {
    const StepSpec& step = s.steps[i];
    const std::string where = "step " + std::to_string(i + 1);
    if (step.action == Action::Unknown) {
      diags.push_back(where + ": unknown action '" + step.tag + "'");
      continue;
    }
    if (step.angle_rad) {
      if (step.action != Action::LowerLegs) {
        diags.push_back(where + ": angle parameter only applies to lower_legs");
      } else if (!(*step.angle_rad > 0.0 && *step.angle_rad <= kPi / 2.0)) {
        diags.push_back(where + ": lowering angle must lie in (0, 90] degrees");
      }
    }
    if (step.voltage_V) {
      const bool latch_action = step.action == Action::LatchAngle || step.action == Action::LatchFlat ||
                                step.action == Action::UnlatchAngle || step.action == Action::UnlatchFlat;
      if (!latch_action) {
        diags.push_back(where + ": voltage parameter only applies to latch actions");
      } else {
        check_voltage(*step.voltage_V, where);
      }
    }
  }
  return diags;
}

// -----------------------------
// Execution
// -----------------------------
namespace {

class Runner {
 public:
  explicit Runner(const Scenario& s) : s_(s), unit_(s.robot) {}

  ScenarioResult run() {
    log("sequence", "start " + s_.name);
    if (auto diags = validate(s_); !diags.empty()) {
      result_.verdict = {false, std::nullopt, "", "invalid scenario: " + diags.front(), std::nullopt};
      log("sequence", "aborted: " + result_.verdict.condition);
      return finish();
    }
    for (std::size_t i = 0; i < s_.steps.size(); ++i) {
      const StepSpec& step = s_.steps[i];
      const MaintenanceUnit before = unit_;
      const std::string label = "step " + std::to_string(i + 1) + " " + step.tag;
      log("sequence", label + " begin");
      try {
        apply(step);
      } catch (const StepFailure& f) {
        unit_ = before;
        result_.verdict = {false, i, step.tag, f.condition, f.leg};
        log("sequence", label + " aborted: " + f.condition);
        return finish();
      }
      log("sequence", label + " done");
      result_.after.push_back(unit_);
    }
    log("sequence", "complete");
    return finish();
  }

 private:
  ScenarioResult finish() {
    result_.final = unit_;
    result_.end_time_s = clock_s_;
    return std::move(result_);
  }

  void log(const std::string& actor, const std::string& event) {
    result_.log.append(clock_s_, actor, event, snapshot_hash(unit_));
  }

  static std::vector<std::size_t> top_legs(const MaintenanceUnit& u) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < u.legs.size(); ++i) {
      if (u.legs[i].is_top()) out.push_back(i);
    }
    return out;
  }

  void apply(const StepSpec& step) {
    switch (step.action) {
      case Action::LowerLegs: return lower(step.angle_rad.value_or(unit_.geometry.lowering_angle_rad()));
      case Action::RaiseLegs: return lower(0.0);
      case Action::MoveIntoPipe: return move(step, true);
      case Action::ExitPipe: return move(step, false);
      case Action::LatchAngle: return actuate_all(step, &WheeledLeg::angle_latch, true);
      case Action::UnlatchAngle: return actuate_all(step, &WheeledLeg::angle_latch, false);
      case Action::LatchFlat: return actuate_all(step, &WheeledLeg::flat_latch, true);
      case Action::UnlatchFlat: return actuate_all(step, &WheeledLeg::flat_latch, false);
      case Action::ExtendLegs: return extend();
      case Action::RetractLegs: return retract();
      case Action::Unknown: throw StepFailure{"unknown action '" + step.tag + "'", std::nullopt};
    }
  }

  // Hinge rotation of the top legs (the bottom legs have no lowering actuator).
  void lower(double angle_rad) {
    for (std::size_t i : top_legs(unit_)) {
      try {
        unit_.legs[i] = dewalop::lower_leg(unit_.legs[i], angle_rad);
      } catch (const Error& e) {
        throw StepFailure{e.what(), unit_.legs[i].id};
      }
      if (unit_.legs[i].hinge_angle_rad != angle_rad) throw StepFailure{"hinge did not reach target", unit_.legs[i].id};
    }
  }

  void move(const StepSpec& step, bool into) {
    if (unit_.in_pipe == into) throw StepFailure{into ? "robot already in pipe" : "robot not in pipe", std::nullopt};
    if (!into) {
      for (const auto& leg : unit_.legs) {
        if (leg.pressed) throw StepFailure{"leg pressed against the pipe wall", leg.id};
        if (leg.flat_latch.state() != LatchState::Housed) throw StepFailure{"flat latch not housed", leg.id};
      }
    }
    const double clearance = dewalop::current_clearance(unit_, s_.pipe);
    if (clearance < 0.0) {
      double push = 0.0;
      try {
        push = dewalop::insertion_force_for_clearance(unit_.legs.front(), clearance);
      } catch (const Error& e) {
        throw StepFailure{e.what(), std::nullopt};
      }
      if (!step.acknowledge_push) {
        throw StepFailure{"insufficient clearance: " + format_g(-clearance * 1000.0) +
                              " mm interference needs a " + format_g(push) +
                              " N push per top leg (acknowledge_push not set)",
                          std::nullopt};
      }
      log("operator", "manual push " + format_g(push) + " N per top leg");
    }
    unit_.in_pipe = into;
    log("robot", std::string(into ? "entered" : "left") + " pipe, clearance " +
                     format_g(clearance * 1000.0) + " mm");
  }

  void actuate_all(const StepSpec& step, latch::LatchFsm WheeledLeg::*which, bool engage) {
    const bool angle = which == &WheeledLeg::angle_latch;
    const char* name = angle ? "angle_latch" : "flat_latch";
    const LatchState from = engage ? LatchState::Housed : LatchState::Latched;
    const LatchState to = engage ? LatchState::Latched : LatchState::Housed;

    for (const auto& leg : unit_.legs) {
      if (engage && angle && leg.lowered()) throw StepFailure{"hinge not perpendicular", leg.id};
      if (engage && !angle) {
        if (!leg.pressed) throw StepFailure{"leg not pressed against the pipe wall", leg.id};
      }
      if ((leg.*which).state() != from) {
        throw StepFailure{std::string(name) + " not " + std::string(latch::to_string(from)), leg.id};
      }
    }
    if (engage && !angle && !dewalop::is_centered(unit_)) {
      throw StepFailure{"wall press not centered", std::nullopt};
    }

    const double v = step.voltage_V.value_or(engage ? s_.latch_voltage_V : s_.unlatch_voltage_V);
    const auto cmd = engage ? latch::DriveCommand::clockwise(v) : latch::DriveCommand::counterclockwise(v);
    for (auto& leg : unit_.legs) {
      const std::string actor = "leg" + std::to_string(leg.id) + "." + name;
      latch::SimulationResult sim;
      try {
        sim = latch::actuate(leg.*which, cmd, s_.dt_s, clock_s_, s_.actuation_timeout_s);
      } catch (const Error& e) {
        throw StepFailure{e.what(), leg.id};
      }
      for (const auto& ev : sim.events) {
        if (!ev.event.is_transition()) continue;
        leg.*which = ev.fsm;
        clock_s_ = ev.t_s;
        log(actor, std::string(latch::to_string(ev.event.from)) + "->" +
                       std::string(latch::to_string(ev.event.to)) + " " + ev.event.what);
      }
      leg.*which = sim.final;
      if (!sim.trace.samples.empty()) clock_s_ = sim.trace.samples.back().t_s;
      auto& samples = result_.trace.samples;
      samples.insert(samples.end(), sim.trace.samples.begin(), sim.trace.samples.end());
    }
    for (const auto& leg : unit_.legs) {
      if ((leg.*which).state() != to) {
        throw StepFailure{std::string(name) + " not " + std::string(latch::to_string(to)), leg.id};
      }
    }
  }

  void extend() {
    if (!unit_.in_pipe) throw StepFailure{"robot not in pipe", std::nullopt};
    for (const auto& leg : unit_.legs) {
      if (leg.lowered()) throw StepFailure{"hinge not perpendicular", leg.id};
    }
    dewalop::WallPressResult press;
    try {
      press = dewalop::wall_press(unit_, s_.pipe);
    } catch (const Error& e) {
      throw StepFailure{e.what(), std::nullopt};
    }
    if (!press.centered) throw StepFailure{"wall press not centered", std::nullopt};
    unit_ = std::move(press.unit);
    log("robot", "wall press, extension " + format_g(press.extension_m.front() * 1000.0) + " mm");
  }

  void retract() {
    for (auto& leg : unit_.legs) {
      if (leg.flat_latch.state() != LatchState::Housed) {
        throw StepFailure{"extension frozen by the flat latch", leg.id};
      }
      leg.extension_m = 0.0;
      leg.pressed = false;
    }
    log("robot", "legs retracted");
  }

  const Scenario& s_;
  MaintenanceUnit unit_;
  ScenarioResult result_;
  double clock_s_ = 0.0;
};

}  // namespace

ScenarioResult run_scenario(const Scenario& s) { return Runner(s).run(); }

// -----------------------------
// Export
// -----------------------------
namespace {

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void write_log_csv(std::ostream& out, const EventLog& log) {
  out << "t_s,actor,event,hash\n";
  for (const auto& e : log.entries()) {
    out << format_g(e.t_s) << ',' << csv_field(e.actor) << ',' << csv_field(e.event) << ',' << e.hash
        << '\n';
  }
}

void write_report(std::ostream& out, const Scenario& s, const ScenarioResult& r) {
  out << "scenario: " << s.name << '\n';
  out << "pipe inner diameter: " << format_g(s.pipe.inner_diameter_m * 1000.0) << " mm\n";
  out << "timestep: " << format_g(s.dt_s) << " s\n";
  out << "verdict: " << r.verdict.describe() << '\n';
  out << "steps completed: " << r.after.size() << " of " << s.steps.size() << '\n';
  for (std::size_t i = 0; i < s.steps.size(); ++i) {
    const char* mark = i < r.after.size() ? "ok" : (r.verdict.failed_step == i ? "FAILED" : "not run");
    out << "  " << (i + 1) << ". " << s.steps[i].tag << ": " << mark << '\n';
  }
  out << "simulated time: " << format_g(r.end_time_s) << " s\n";
  out << "final robot: " << (r.final.in_pipe ? "in pipe" : "outside pipe")
      << ", centered: " << (dewalop::is_centered(r.final) ? "yes" : "no") << '\n';
  out << "top-leg clearance: " << format_g(dewalop::current_clearance(r.final, s.pipe) * 1000.0) << " mm\n";
  out << '\n';
  dewalop::write_leg_csv(out, r.final);

  const auto& leg = r.final.legs.front();
  for (double force : {1000.0, 2000.0}) {
    const auto path = dewalop::leg_load_path(leg, force);
    out << "\nload path leg " << leg.id << " at " << format_g(force) << " N: actuator "
        << format_g(path.actuator_share_N) << " N, structure " << format_g(path.structure_share_N) << " N";
    if (path.plate) out << ", plate SF " << format_g(path.plate->safety_factor, 4);
    out << ", " << (path.passed ? "pass" : "FAIL");
    for (const auto& f : path.failures) out << " [" << f << "]";
  }
  out << "\nfinal snapshot hash: " << snapshot_hash(r.final) << '\n';
}

}  // namespace lammos::sequence
