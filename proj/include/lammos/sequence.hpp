#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "lammos/dewalop.hpp"
#include "lammos/latch.hpp"

namespace lammos::sequence {

enum class Action {
  LowerLegs,
  MoveIntoPipe,
  RaiseLegs,
  LatchAngle,
  ExtendLegs,
  LatchFlat,
  UnlatchFlat,
  RetractLegs,
  UnlatchAngle,
  ExitPipe,
  Unknown,
};

std::string_view to_string(Action action);
Action parse_action(std::string_view tag);
/// The action that undoes `action` (lower <-> raise, latch_flat <-> unlatch_flat, ...).
Action inverse(Action action);

struct StepSpec {
  Action action = Action::Unknown;
  std::string tag;  // as written in the scenario file

  std::optional<double> angle_rad;    // lower_legs; defaults to the fitted lowering angle
  std::optional<double> voltage_V;    // latch/unlatch actions
  bool acknowledge_push = false;      // move_into_pipe/exit_pipe with negative clearance

  static StepSpec of(Action action);
};

struct Scenario {
  std::string name = "scenario";
  dewalop::MaintenanceUnit robot = dewalop::MaintenanceUnit::make();
  dewalop::PipeEnvironment pipe;
  std::vector<StepSpec> steps;
  double dt_s = 0.01;
  // Screwing runs at 3 V, unscrewing at 6 V unless a step says otherwise.
  double latch_voltage_V = 3.0;
  double unlatch_voltage_V = 6.0;
  double actuation_timeout_s = 120.0;
};

/// Insertion order: lower, move in, raise, latch angle, extend (wall press), latch flat.
std::vector<StepSpec> canonical_forward_steps();
/// unlatch_flat, retract, unlatch_angle, lower, exit.
std::vector<StepSpec> canonical_reverse_steps();
/// Exact inverse sequence: reversed order, each action inverted.
std::vector<StepSpec> inverse_steps(const std::vector<StepSpec>& steps);

Scenario canonical_insertion(double pipe_diameter_m = 0.800, double dt_s = 0.01);

struct LogEntry {
  double t_s = 0.0;
  std::string actor;
  std::string event;
  std::string hash;  // snapshot digest of the robot right after the event

  bool operator==(const LogEntry&) const = default;
};

/// Append-only, time-ordered.
class EventLog {
 public:
  void append(double t_s, std::string actor, std::string event, std::string hash);
  const std::vector<LogEntry>& entries() const { return entries_; }

  bool operator==(const EventLog&) const = default;

 private:
  std::vector<LogEntry> entries_;
};

/// 64-bit FNV-1a of the canonical serialisation, as 16 lowercase hex digits.
std::string snapshot_hash(const dewalop::MaintenanceUnit& unit);

struct Verdict {
  bool success = true;
  std::optional<std::size_t> failed_step;
  std::string action;
  std::string condition;
  std::optional<int> leg;

  std::string describe() const;
};

struct ScenarioResult {
  dewalop::MaintenanceUnit final;
  EventLog log;
  Verdict verdict;
  latch::CurrentTrace trace;                    // every latch actuation, back to back
  std::vector<dewalop::MaintenanceUnit> after;  // robot after each completed step
  double end_time_s = 0.0;
};

/// Static checks only; an empty list means the scenario can be run.
std::vector<std::string> validate(const Scenario& s);

/// Executes the steps in order with pre/postcondition checks. On the first violation
/// the robot is returned as it was before the failing step.
ScenarioResult run_scenario(const Scenario& s);

/// `t_s,actor,event,hash`
void write_log_csv(std::ostream& out, const EventLog& log);

void write_report(std::ostream& out, const Scenario& s, const ScenarioResult& r);

}  // namespace lammos::sequence
