#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lammos/latch.hpp"
#include "lammos/mechlib.hpp"

namespace lammos::exo {

/// A revolute exoskeleton joint held by a geared servo, with a flat-bracket LaMMos on
/// its movable plate.
struct ExoJoint {
  MotorSpec motor = MotorSpec::micro_gearmotor_298();
  double supply_voltage_V = 6.0;
  latch::LatchFsm lock;
  double standby_power_W = 0.1;
  double load_torque_Nm = 0.0;

  double latch_voltage_V = 3.0;
  double latch_dt_s = 1e-3;

  PlateSpec plate = PlateSpec::flat_bracket_plate();
  MaterialSpec material = MaterialSpec::mild_steel();

  bool locked() const { return lock.state() == latch::LatchState::Latched; }
  void validate() const;
};

/// Servo power to hold `load_torque_Nm` at zero speed.
double unlocked_hold_power(const ExoJoint& joint, double load_torque_Nm);

/// standby_power_W when locked; otherwise V*I at zero speed. Throws Overload when an
/// unlocked joint cannot hold the load at all.
double hold_power(const ExoJoint& joint);

struct LoadPoint {
  double t_s = 0.0;
  double load_Nm = 0.0;
};

/// Piecewise-constant load: point i holds from t_i until t_{i+1}. The last point only
/// marks the end time.
struct LoadTimeline {
  std::vector<LoadPoint> points;

  void validate() const;
  double start_s() const { return points.front().t_s; }
  double end_s() const { return points.back().t_s; }
  double duration_s() const { return end_s() - start_s(); }

  static LoadTimeline constant(double load_Nm, double duration_s);
};

/// Reads `t_s,load_Nm` CSV (header required).
LoadTimeline read_timeline_csv(std::istream& in);

struct EnergyComparison {
  double held_energy_J = 0.0;
  double locked_energy_J = 0.0;
  double savings_J = 0.0;
  double latch_energy_J = 0.0;
  double lock_at_s = 0.0;
};

/// One-shot electrical energy of driving the lock from Housed to Latched.
double latch_energy(const ExoJoint& joint);

/// Holding the timeline on the servo versus locking at lock_at (default: timeline start).
EnergyComparison energy_comparison(const ExoJoint& joint, const LoadTimeline& timeline,
                                   std::optional<double> lock_at_s = std::nullopt);

bool auto_lock_decision(const ExoJoint& joint, double power_now_W, double threshold_W);

/// Bending check of the movable plate carrying the joint torque while locked. The torque
/// acts as a tip force at the plate length. Empty at zero load.
std::optional<SafetyResult> locked_structural_check(const ExoJoint& joint);

void write_comparison_csv(std::ostream& out, const EnergyComparison& c);
void write_comparison_report(std::ostream& out, const ExoJoint& joint, const LoadTimeline& timeline,
                             const EnergyComparison& c);

}  // namespace lammos::exo
