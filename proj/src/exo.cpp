#include "lammos/exo.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include "lammos/errors.hpp"
#include "lammos/format.hpp"

namespace lammos::exo {

void ExoJoint::validate() const {
  if (!(standby_power_W >= 0.0)) throw InvalidSpec("exo: standby power must be non-negative");
  if (!(load_torque_Nm >= 0.0)) throw InvalidSpec("exo: load torque must be non-negative");
  if (!(latch_dt_s > 0.0)) throw InvalidSpec("exo: latch time step must be positive");
  motor.at_voltage(supply_voltage_V);
  lock.config().motor.at_voltage(latch_voltage_V);
  plate.validate();
  material.validate();
}

double unlocked_hold_power(const ExoJoint& joint, double load_torque_Nm) {
  const OperatingPoint op = motor_operating_point(joint.motor, joint.supply_voltage_V, load_torque_Nm);
  if (op.stalled) {
    throw Overload("exo: load torque " + format_g(load_torque_Nm) + " N*m exceeds stall torque " +
                   format_g(op.stall_torque_Nm) + " N*m at " + format_g(joint.supply_voltage_V) + " V");
  }
  return joint.supply_voltage_V * op.current_A;
}

double hold_power(const ExoJoint& joint) {
  if (joint.locked()) return joint.standby_power_W;
  return unlocked_hold_power(joint, joint.load_torque_Nm);
}

// -----------------------------
// Timeline
// -----------------------------
void LoadTimeline::validate() const {
  if (points.empty()) throw InvalidSpec("timeline: at least one point is required");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].load_Nm >= 0.0)) throw InvalidSpec("timeline: loads must be non-negative");
    if (i > 0 && !(points[i].t_s > points[i - 1].t_s)) {
      throw InvalidSpec("timeline: times must be strictly increasing");
    }
  }
}

LoadTimeline LoadTimeline::constant(double load_Nm, double duration_s) {
  return {{{0.0, load_Nm}, {duration_s, load_Nm}}};
}

LoadTimeline read_timeline_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidSpec("timeline: empty CSV");
  if (line.rfind("t_s,load_Nm", 0) != 0) throw InvalidSpec("timeline: expected header t_s,load_Nm");
  LoadTimeline tl;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    std::istringstream fields(line);
    LoadPoint p;
    char comma = 0;
    if (!(fields >> p.t_s >> comma >> p.load_Nm) || comma != ',') {
      throw InvalidSpec("timeline: malformed row " + std::to_string(row));
    }
    tl.points.push_back(p);
  }
  tl.validate();
  return tl;
}

// -----------------------------
// Energy
// -----------------------------
double latch_energy(const ExoJoint& joint) {
  latch::LatchFsm housed(joint.lock.config());
  const auto sim = latch::actuate(housed, latch::DriveCommand::clockwise(joint.latch_voltage_V), joint.latch_dt_s);
  return latch::trace_energy_J(sim.trace, joint.latch_voltage_V, joint.latch_dt_s);
}

EnergyComparison energy_comparison(const ExoJoint& joint, const LoadTimeline& timeline,
                                   std::optional<double> lock_at_s) {
  joint.validate();
  timeline.validate();
  EnergyComparison c;
  c.lock_at_s = lock_at_s.value_or(timeline.start_s());
  if (!(c.lock_at_s >= timeline.start_s() && c.lock_at_s <= timeline.end_s())) {
    throw OutOfRange("exo: lock time " + format_g(c.lock_at_s) + " s outside the timeline");
  }
  if (timeline.duration_s() == 0.0) return c;

  // Savings only accrue over the locked part, so locking at the very end gives exactly
  // -latch_energy.
  double held = 0.0;
  double avoided = 0.0;
  const auto& pts = timeline.points;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    double power = 0.0;
    try {
      power = unlocked_hold_power(joint, pts[i].load_Nm);
    } catch (const Overload& e) {
      throw Overload("at t=" + format_g(pts[i].t_s) + " s: " + e.what());
    }
    const double span = pts[i + 1].t_s - pts[i].t_s;
    held += power * span;
    const double locked_span = std::max(0.0, pts[i + 1].t_s - std::max(pts[i].t_s, c.lock_at_s));
    if (locked_span > 0.0) avoided += (power - joint.standby_power_W) * locked_span;
  }
  c.latch_energy_J = latch_energy(joint);
  c.held_energy_J = held;
  c.locked_energy_J = held - avoided + c.latch_energy_J;
  c.savings_J = avoided - c.latch_energy_J;
  return c;
}

bool auto_lock_decision(const ExoJoint& joint, double power_now_W, double threshold_W) {
  if (!(threshold_W > 0.0)) throw OutOfRange("exo: auto-lock threshold must be positive");
  return power_now_W >= threshold_W && joint.lock.state() == latch::LatchState::Housed;
}

std::optional<SafetyResult> locked_structural_check(const ExoJoint& joint) {
  if (joint.load_torque_Nm == 0.0) return std::nullopt;
  const double lever = joint.plate.length_m;
  return plate_bending_safety_factor(joint.plate, joint.material, joint.load_torque_Nm / lever, lever);
}

void write_comparison_csv(std::ostream& out, const EnergyComparison& c) {
  out << "lock_at_s,held_energy_J,locked_energy_J,latch_energy_J,savings_J\n";
  out << format_g(c.lock_at_s) << ',' << format_g(c.held_energy_J) << ',' << format_g(c.locked_energy_J)
      << ',' << format_g(c.latch_energy_J) << ',' << format_g(c.savings_J) << '\n';
}

void write_comparison_report(std::ostream& out, const ExoJoint& joint, const LoadTimeline& timeline,
                             const EnergyComparison& c) {
  out << "exoskeleton joint hold: servo vs LaMMos lock\n";
  out << "supply voltage: " << format_g(joint.supply_voltage_V) << " V, standby power: "
      << format_g(joint.standby_power_W) << " W\n";
  out << "timeline: " << format_g(timeline.start_s()) << " .. " << format_g(timeline.end_s()) << " s, "
      << timeline.points.size() << " points\n";
  out << "lock at: " << format_g(c.lock_at_s) << " s\n";
  out << "held on servo: " << format_g(c.held_energy_J) << " J\n";
  out << "with lock:     " << format_g(c.locked_energy_J) << " J (latch drive " << format_g(c.latch_energy_J)
      << " J)\n";
  out << "savings:       " << format_g(c.savings_J) << " J\n";
  if (auto sf = locked_structural_check(joint)) {
    out << "locked plate SF at current load: " << format_g(sf->safety_factor, 4)
        << (sf->failed() ? " (FAILED)" : "") << '\n';
  }
}

}  // namespace lammos::exo
