#pragma once

#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "lammos/mechlib.hpp"

namespace lammos::latch {

enum class LatchState {
  Housed,
  EngagingFlexNut,
  Traversing,
  Tightening,
  Latched,
  Loosening,
  Retracting,
};

std::string_view to_string(LatchState state);
std::optional<LatchState> parse_latch_state(std::string_view name);

/// True for self-loops and for the seven edges of the latch/unlatch cycle.
bool is_legal_transition(LatchState from, LatchState to);

enum class Direction { Off, Clockwise, CounterClockwise };

std::string_view to_string(Direction direction);

struct DriveCommand {
  double voltage_V = 0.0;
  Direction direction = Direction::Off;

  static DriveCommand off() { return {}; }
  static DriveCommand clockwise(double v) { return {v, Direction::Clockwise}; }
  static DriveCommand counterclockwise(double v) { return {v, Direction::CounterClockwise}; }

  bool active() const { return direction != Direction::Off; }
  bool operator==(const DriveCommand&) const = default;
};

/// Everything about a latch that does not change while it runs.
///
/// Positions are of the screw tip along the screw axis, measured from the top plane of
/// the bracket, positive towards the T-slot nut. Housed rest is -housed_overhang_m; the
/// screw meets the T-slot nut face at bracket_thickness_m + tslot_gap_m.
struct LatchConfig {
  MotorSpec motor = MotorSpec::micro_gearmotor_298();
  ScrewSpec screw = ScrewSpec::m8x18();
  SpringSpec spring = SpringSpec::lammos_default();

  double flexnut_friction_torque_Nm = 0.02;
  double bracket_thickness_m = 0.009;
  double tslot_gap_m = 0.004;
  double housed_overhang_m = 0.002;

  // Tightening completes once the current reaches this fraction of stall current.
  double tightening_current_threshold = 0.9;
  // Clamp torque grows linearly with engagement past the nut face.
  double clamp_torque_rate_Nm_per_m = 300.0;
  // Loosening starts at breakaway_factor * clamp torque, decaying to flexnut friction
  // once the engagement is backed out.
  double breakaway_factor = 1.15;
  // Spring preload deflection while housed; default puts the spring at its rated load.
  double spring_preload_deflection_m = 0.0;

  static LatchConfig lammos_default();

  /// Throws InvalidSpec when geometry or thresholds are inconsistent.
  void validate() const;

  double contact_position_m() const { return bracket_thickness_m + tslot_gap_m; }

  bool operator==(const LatchConfig&) const = default;
};

/// Immutable latch snapshot. The configuration is shared between copies.
class LatchFsm {
 public:
  explicit LatchFsm(LatchConfig config = LatchConfig::lammos_default());

  const LatchConfig& config() const { return *config_; }
  LatchState state() const { return state_; }
  double screw_tip_position_m() const { return position_m_; }
  /// Load torque at the moment tightening completed; zero when not latched.
  double clamp_torque_Nm() const { return clamp_torque_Nm_; }
  const DriveCommand& drive() const { return drive_; }
  double current_A() const { return current_A_; }

  bool operator==(const LatchFsm& other) const;

 private:
  friend struct StepAccess;

  std::shared_ptr<const LatchConfig> config_;
  LatchState state_ = LatchState::Housed;
  double position_m_ = 0.0;
  double clamp_torque_Nm_ = 0.0;
  DriveCommand drive_;
  double current_A_ = 0.0;
};

struct LatchEvent {
  LatchState from = LatchState::Housed;
  LatchState to = LatchState::Housed;
  std::string what;

  bool is_transition() const { return from != to; }
};

struct StepResult {
  LatchFsm fsm;
  std::optional<LatchEvent> event;
};

/// Advances the latch by dt under a drive command. Pure: the input is not modified.
StepResult step(const LatchFsm& fsm, const DriveCommand& cmd, double dt_s);

struct TraceSample {
  double t_s = 0.0;
  double current_A = 0.0;
  double position_m = 0.0;
  LatchState state = LatchState::Housed;

  bool operator==(const TraceSample&) const = default;
};

struct TimedLatchEvent {
  double t_s = 0.0;
  LatchEvent event;
  LatchFsm fsm;  // state right after the event
};

struct CurrentTrace {
  std::vector<TraceSample> samples;

  bool operator==(const CurrentTrace&) const = default;
};

struct ScheduleEntry {
  DriveCommand command;
  double duration_s = 0.0;
};

struct SimulationResult {
  LatchFsm final;
  CurrentTrace trace;
  std::vector<TimedLatchEvent> events;
};

/// Replays a drive schedule with a fixed step. Sample k is taken after step k at
/// t0 + (k+1)*dt. Step errors are re-thrown with the offending timestamp.
SimulationResult simulate(const LatchFsm& fsm, const std::vector<ScheduleEntry>& schedule,
                          double dt_s, double t0_s = 0.0);

CurrentTrace simulate_trace(const LatchFsm& fsm, const std::vector<ScheduleEntry>& schedule,
                            double dt_s);

/// Drives until the phase for cmd's direction completes (Latched for clockwise, Housed
/// for counterclockwise), then releases the drive with one off step. Throws StateError
/// when max_duration_s elapses first.
SimulationResult actuate(const LatchFsm& fsm, const DriveCommand& cmd, double dt_s,
                         double t0_s = 0.0, double max_duration_s = 120.0);

/// Electrical energy drawn over a trace, sum of V*I*dt with the commanded voltage.
double trace_energy_J(const CurrentTrace& trace, double voltage_V, double dt_s);

/// Whether spring push alone cannot drive a housed screw through the flexible nut.
bool holds_housed_without_power(const LatchFsm& fsm);

/// Electrical power drawn right now; zero whenever no drive is active.
double static_power(const LatchFsm& fsm);

struct IllegalTransition {
  std::size_t sample_index = 0;
  LatchState from = LatchState::Housed;
  LatchState to = LatchState::Housed;
};

/// Checks consecutive states of a trace (starting from `initial`) against the legal edges.
std::vector<IllegalTransition> audit_transitions(const CurrentTrace& trace, LatchState initial);

/// CSV header `t_s,current_A,position_m,state`, floats with 9 significant digits.
void write_trace_csv(std::ostream& out, const CurrentTrace& trace, bool header = true);

}  // namespace lammos::latch
