#include "lammos/latch.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lammos/errors.hpp"
#include "lammos/format.hpp"

namespace lammos::latch {

std::string_view to_string(LatchState state) {
  switch (state) {
    case LatchState::Housed: return "Housed";
    case LatchState::EngagingFlexNut: return "EngagingFlexNut";
    case LatchState::Traversing: return "Traversing";
    case LatchState::Tightening: return "Tightening";
    case LatchState::Latched: return "Latched";
    case LatchState::Loosening: return "Loosening";
    case LatchState::Retracting: return "Retracting";
  }
  return "?";
}

std::optional<LatchState> parse_latch_state(std::string_view name) {
  for (auto s : {LatchState::Housed, LatchState::EngagingFlexNut, LatchState::Traversing,
                 LatchState::Tightening, LatchState::Latched, LatchState::Loosening,
                 LatchState::Retracting}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

std::string_view to_string(Direction direction) {
  switch (direction) {
    case Direction::Off: return "off";
    case Direction::Clockwise: return "clockwise";
    case Direction::CounterClockwise: return "counterclockwise";
  }
  return "?";
}

bool is_legal_transition(LatchState from, LatchState to) {
  using S = LatchState;
  if (from == to) return true;
  switch (from) {
    case S::Housed: return to == S::EngagingFlexNut;
    case S::EngagingFlexNut: return to == S::Traversing;
    case S::Traversing: return to == S::Tightening;
    case S::Tightening: return to == S::Latched;
    case S::Latched: return to == S::Loosening;
    case S::Loosening: return to == S::Retracting;
    case S::Retracting: return to == S::Housed;
  }
  return false;
}

// -----------------------------
// Configuration
// -----------------------------
LatchConfig LatchConfig::lammos_default() {
  LatchConfig c;
  c.spring_preload_deflection_m = c.spring.max_load_N / spring_rate(c.spring);
  return c;
}

void LatchConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw InvalidSpec(std::string("latch: ") + what);
  };
  screw.validate();
  spring.validate();
  require(flexnut_friction_torque_Nm >= 0.0, "flexible-nut friction torque must be non-negative");
  require(bracket_thickness_m > 0.0, "bracket thickness must be positive");
  require(tslot_gap_m >= 0.0, "T-slot gap must be non-negative");
  require(housed_overhang_m > 0.0, "housed overhang must be positive");
  require(housed_overhang_m + contact_position_m() <= screw.length_m,
          "housed overhang + bracket thickness + T-slot gap exceed the screw length");
  require(tightening_current_threshold > 0.0 && tightening_current_threshold <= 1.0,
          "tightening current threshold must lie in (0, 1]");
  require(clamp_torque_rate_Nm_per_m > 0.0, "clamp torque rate must be positive");
  require(breakaway_factor >= 1.0, "breakaway factor must be at least 1");
  require(spring_preload_deflection_m >= 0.0, "spring preload deflection must be non-negative");
  spring_force(spring, spring_preload_deflection_m);  // throws Overload
}

LatchFsm::LatchFsm(LatchConfig config)
    : config_(std::make_shared<const LatchConfig>(std::move(config))) {
  config_->validate();
  position_m_ = -config_->housed_overhang_m;
}

bool LatchFsm::operator==(const LatchFsm& other) const {
  return (config_ == other.config_ || *config_ == *other.config_) && state_ == other.state_ &&
         position_m_ == other.position_m_ && clamp_torque_Nm_ == other.clamp_torque_Nm_ &&
         drive_ == other.drive_ && current_A_ == other.current_A_;
}

// -----------------------------
// Transition function
// -----------------------------
struct StepAccess {
  static StepResult run(const LatchFsm& in, const DriveCommand& cmd, double dt_s);

 private:
  static StepResult idle(LatchFsm next, std::optional<LatchEvent> event) {
    next.drive_ = DriveCommand::off();
    next.current_A_ = 0.0;
    return {std::move(next), std::move(event)};
  }
  static StepResult clockwise(LatchFsm next, double dt_s);
  static StepResult counterclockwise(LatchFsm next, double dt_s);
};

StepResult StepAccess::run(const LatchFsm& in, const DriveCommand& cmd, double dt_s) {
  if (!(dt_s > 0.0)) throw OutOfRange("latch: time step must be positive");
  if (cmd.active()) in.config().motor.at_voltage(cmd.voltage_V);  // range check

  LatchFsm next = in;
  next.drive_ = cmd;
  switch (cmd.direction) {
    case Direction::Off: return idle(std::move(next), std::nullopt);
    case Direction::Clockwise: return clockwise(std::move(next), dt_s);
    case Direction::CounterClockwise: return counterclockwise(std::move(next), dt_s);
  }
  return idle(std::move(next), std::nullopt);
}

StepResult StepAccess::clockwise(LatchFsm next, double dt_s) {
  using S = LatchState;
  const LatchConfig& c = *next.config_;
  const S before = next.state_;

  if (before == S::Latched) return idle(std::move(next), LatchEvent{before, before, "already latched"});
  if (before == S::Loosening || before == S::Retracting) {
    return idle(std::move(next), LatchEvent{before, before, "direction refused"});
  }

  std::optional<LatchEvent> event;
  if (before == S::Housed) {
    next.state_ = S::EngagingFlexNut;
    event = LatchEvent{before, next.state_, "screw leaves housing"};
  }

  double load = c.flexnut_friction_torque_Nm;
  if (next.state_ == S::Tightening) {
    load += c.clamp_torque_rate_Nm_per_m * (next.position_m_ - c.contact_position_m());
  }
  const double v = next.drive_.voltage_V;
  const OperatingPoint op = motor_operating_point(c.motor, v, load);
  next.current_A_ = op.current_A;

  if (next.state_ == S::Tightening &&
      op.current_A >= c.tightening_current_threshold * c.motor.at_voltage(v).stall_current_A) {
    next.state_ = S::Latched;
    next.clamp_torque_Nm_ = load;
    return {std::move(next), LatchEvent{S::Tightening, S::Latched, "clamp reached"}};
  }

  next.position_m_ += op.speed_rev_s * c.screw.pitch_m * dt_s;

  if (!event) {
    if (next.state_ == S::EngagingFlexNut && next.position_m_ >= 0.0) {
      next.state_ = S::Traversing;
      event = LatchEvent{S::EngagingFlexNut, S::Traversing, "flexible nut thread engaged"};
    } else if (next.state_ == S::Traversing && next.position_m_ >= c.contact_position_m()) {
      next.state_ = S::Tightening;
      event = LatchEvent{S::Traversing, S::Tightening, "T-slot nut contact"};
    }
  }
  return {std::move(next), std::move(event)};
}

StepResult StepAccess::counterclockwise(LatchFsm next, double dt_s) {
  using S = LatchState;
  const LatchConfig& c = *next.config_;
  const S before = next.state_;

  if (before == S::Housed) return idle(std::move(next), LatchEvent{before, before, "already housed"});
  if (before == S::EngagingFlexNut || before == S::Traversing || before == S::Tightening) {
    return idle(std::move(next), LatchEvent{before, before, "direction refused"});
  }

  std::optional<LatchEvent> event;
  if (before == S::Latched) {
    next.state_ = S::Loosening;
    event = LatchEvent{before, next.state_, "breakaway"};
  }

  const double friction = c.flexnut_friction_torque_Nm;
  double load = friction;
  if (next.state_ == S::Loosening) {
    // Preload relief: torque falls linearly from breakaway to friction as the
    // engagement made while tightening is backed out.
    const double breakaway = c.breakaway_factor * next.clamp_torque_Nm_;
    const double engaged_at_latch = (next.clamp_torque_Nm_ - friction) / c.clamp_torque_rate_Nm_per_m;
    const double engaged = next.position_m_ - c.contact_position_m();
    const double remaining =
        engaged_at_latch > 0.0 ? std::clamp(engaged / engaged_at_latch, 0.0, 1.0) : 1.0;
    load = std::max(friction, friction + (breakaway - friction) * remaining);
  }

  const OperatingPoint op = motor_operating_point(c.motor, next.drive_.voltage_V, load);
  next.current_A_ = op.current_A;
  next.position_m_ -= op.speed_rev_s * c.screw.pitch_m * dt_s;

  if (!event) {
    if (next.state_ == S::Loosening && next.position_m_ < c.contact_position_m()) {
      next.state_ = S::Retracting;
      event = LatchEvent{S::Loosening, S::Retracting, "T-slot nut released"};
    } else if (next.state_ == S::Retracting && next.position_m_ <= -c.housed_overhang_m) {
      // Spring re-seats the motor capsule against the bracket base.
      next.state_ = S::Housed;
      next.position_m_ = -c.housed_overhang_m;
      next.clamp_torque_Nm_ = 0.0;
      event = LatchEvent{S::Retracting, S::Housed, "screw housed"};
    }
  }
  return {std::move(next), std::move(event)};
}

StepResult step(const LatchFsm& fsm, const DriveCommand& cmd, double dt_s) {
  return StepAccess::run(fsm, cmd, dt_s);
}

// -----------------------------
// Traces
// -----------------------------
namespace {

[[noreturn]] void rethrow_at(double t_s) {
  const std::string where = "at t=" + format_g(t_s) + " s: ";
  try {
    throw;
  } catch (const OutOfRange& e) {
    throw OutOfRange(where + e.what());
  } catch (const Overload& e) {
    throw Overload(where + e.what());
  } catch (const StateError& e) {
    throw StateError(where + e.what());
  } catch (const InvalidSpec& e) {
    throw InvalidSpec(where + e.what());
  } catch (const Error& e) {
    throw Error(where + e.what());
  }
}

}  // namespace

SimulationResult simulate(const LatchFsm& fsm, const std::vector<ScheduleEntry>& schedule,
                          double dt_s, double t0_s) {
  if (!(dt_s > 0.0)) throw OutOfRange("latch: time step must be positive");
  SimulationResult out{fsm, {}, {}};
  std::size_t k = 0;
  for (const auto& entry : schedule) {
    if (!(entry.duration_s > 0.0)) throw OutOfRange("latch: schedule durations must be positive");
    const auto steps = std::max<long long>(1, std::llround(entry.duration_s / dt_s));
    for (long long i = 0; i < steps; ++i) {
      const double t = t0_s + static_cast<double>(k + 1) * dt_s;
      StepResult r = [&] {
        try {
          return step(out.final, entry.command, dt_s);
        } catch (const Error&) {
          rethrow_at(t);
        }
      }();
      out.final = std::move(r.fsm);
      ++k;
      out.trace.samples.push_back(
          {t, out.final.current_A(), out.final.screw_tip_position_m(), out.final.state()});
      if (r.event) out.events.push_back({t, std::move(*r.event), out.final});
    }
  }
  return out;
}

CurrentTrace simulate_trace(const LatchFsm& fsm, const std::vector<ScheduleEntry>& schedule,
                            double dt_s) {
  return simulate(fsm, schedule, dt_s).trace;
}

SimulationResult actuate(const LatchFsm& fsm, const DriveCommand& cmd, double dt_s, double t0_s,
                         double max_duration_s) {
  if (!(dt_s > 0.0)) throw OutOfRange("latch: time step must be positive");
  if (!cmd.active()) throw StateError("latch: actuation needs a drive direction");
  const LatchState target =
      cmd.direction == Direction::Clockwise ? LatchState::Latched : LatchState::Housed;

  SimulationResult out{fsm, {}, {}};
  if (fsm.state() == target) return out;

  std::size_t k = 0;
  auto record = [&](StepResult r) {
    ++k;
    const double t = t0_s + static_cast<double>(k) * dt_s;
    out.final = std::move(r.fsm);
    out.trace.samples.push_back(
        {t, out.final.current_A(), out.final.screw_tip_position_m(), out.final.state()});
    if (r.event) out.events.push_back({t, std::move(*r.event), out.final});
  };

  while (out.final.state() != target) {
    if (static_cast<double>(k) * dt_s >= max_duration_s) {
      throw StateError("latch: " + std::string(to_string(cmd.direction)) + " drive at " +
                       format_g(cmd.voltage_V) + " V did not reach " +
                       std::string(to_string(target)) + " within " + format_g(max_duration_s) +
                       " s (stuck in " + std::string(to_string(out.final.state())) + ")");
    }
    StepResult r = step(out.final, cmd, dt_s);
    if (r.event && r.event->what == "direction refused") {
      throw StateError("latch: " + std::string(to_string(cmd.direction)) + " drive refused in " +
                       std::string(to_string(out.final.state())));
    }
    record(std::move(r));
  }
  record(step(out.final, DriveCommand::off(), dt_s));
  return out;
}

double trace_energy_J(const CurrentTrace& trace, double voltage_V, double dt_s) {
  double energy = 0.0;
  for (const auto& s : trace.samples) energy += voltage_V * s.current_A * dt_s;
  return energy;
}

bool holds_housed_without_power(const LatchFsm& fsm) {
  if (fsm.state() != LatchState::Housed) {
    throw StateError("latch: housing check requires the Housed state, got " +
                     std::string(to_string(fsm.state())));
  }
  const LatchConfig& c = fsm.config();
  const double push = spring_force(c.spring, c.spring_preload_deflection_m);
  return screw_backdrive_torque(c.screw, push) < c.flexnut_friction_torque_Nm;
}

double static_power(const LatchFsm& fsm) {
  if (!fsm.drive().active()) return 0.0;
  return fsm.drive().voltage_V * fsm.current_A();
}

std::vector<IllegalTransition> audit_transitions(const CurrentTrace& trace, LatchState initial) {
  std::vector<IllegalTransition> bad;
  LatchState prev = initial;
  for (std::size_t i = 0; i < trace.samples.size(); ++i) {
    const LatchState cur = trace.samples[i].state;
    if (!is_legal_transition(prev, cur)) bad.push_back({i, prev, cur});
    prev = cur;
  }
  return bad;
}

void write_trace_csv(std::ostream& out, const CurrentTrace& trace, bool header) {
  if (header) out << "t_s,current_A,position_m,state\n";
  for (const auto& s : trace.samples) {
    out << format_g(s.t_s) << ',' << format_g(s.current_A) << ',' << format_g(s.position_m) << ','
        << to_string(s.state) << '\n';
  }
}

}  // namespace lammos::latch
