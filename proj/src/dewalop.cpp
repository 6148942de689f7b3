#include "lammos/dewalop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lammos/errors.hpp"
#include "lammos/format.hpp"

namespace lammos::dewalop {

namespace {

double to_mm(double m) { return m * 1000.0; }

}  // namespace

void PipeEnvironment::validate() const {
  if (!in_operating_range()) {
    throw OutOfRange("pipe out of operating range: inner diameter " +
                     format_g(inner_diameter_m * 1000.0) + " mm not in [800, 1000] mm");
  }
}

// -----------------------------
// Geometry
// -----------------------------
void LegGeometry::validate() const {
  if (!(hinge_radius_mm > 0.0 && leg_span_mm > 0.0)) {
    throw InvalidSpec("leg geometry: hinge radius and leg span must be positive");
  }
  if (!(lowered_reach_mm >= hinge_radius_mm && lowered_reach_mm < hinge_radius_mm + leg_span_mm)) {
    throw InvalidSpec("leg geometry: lowered reach must lie between the hinge radius and the raised reach");
  }
}

double LegGeometry::lowering_angle_rad() const {
  return std::acos((lowered_reach_mm - hinge_radius_mm) / leg_span_mm);
}

double LegGeometry::reach_mm(double hinge_angle_rad) const {
  const double reach = hinge_radius_mm + leg_span_mm * std::cos(hinge_angle_rad);
  return std::round(reach * 1e6) / 1e6;
}

MaintenanceUnit MaintenanceUnit::make(const latch::LatchConfig& latch_config,
                                      const LegGeometry& geometry) {
  geometry.validate();
  const latch::LatchFsm housed(latch_config);
  MaintenanceUnit unit;
  unit.geometry = geometry;
  for (std::size_t i = 0; i < kLegCount; ++i) {
    WheeledLeg& leg = unit.legs[i];
    leg.id = static_cast<int>(i);
    leg.ring = static_cast<int>(i / 3);
    leg.azimuth_deg = 120.0 * static_cast<double>(i % 3);
    leg.has_lower_actuator = leg.is_top();
    leg.angle_latch = housed;
    leg.flat_latch = housed;
  }
  return unit;
}

void MaintenanceUnit::validate() const {
  geometry.validate();
  for (int ring = 0; ring < 2; ++ring) {
    for (int k = 0; k < 3; ++k) {
      const WheeledLeg& leg = legs[static_cast<std::size_t>(ring * 3 + k)];
      if (leg.ring != ring || leg.azimuth_deg != 120.0 * k) {
        throw InvalidSpec("maintenance unit: legs must form two rings at 0/120/240 degrees");
      }
    }
  }
  for (const auto& leg : legs) {
    if (leg.lowered() && leg.angle_latch.state() != latch::LatchState::Housed) {
      throw InvalidSpec("maintenance unit: leg " + std::to_string(leg.id) +
                        " is lowered with its angle latch engaged");
    }
  }
}

// -----------------------------
// Insertion
// -----------------------------
namespace {

double clearance_at(const MaintenanceUnit& unit, const PipeEnvironment& pipe, double hinge_angle_rad) {
  const double gap_mm = to_mm(pipe.inner_diameter_m) / 2.0 - unit.geometry.reach_mm(hinge_angle_rad);
  return gap_mm / 1000.0;
}

}  // namespace

double insertion_clearance(const MaintenanceUnit& unit, const PipeEnvironment& pipe,
                           bool top_legs_lowered) {
  const double angle = top_legs_lowered ? unit.geometry.lowering_angle_rad() : 0.0;
  return clearance_at(unit, pipe, angle);
}

double current_clearance(const MaintenanceUnit& unit, const PipeEnvironment& pipe) {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& leg : unit.legs) {
    if (leg.is_top()) worst = std::min(worst, clearance_at(unit, pipe, leg.hinge_angle_rad));
  }
  return worst;
}

double insertion_force_for_clearance(const WheeledLeg& leg, double clearance_m) {
  if (clearance_m >= 0.0) return 0.0;
  if (-clearance_m > leg.gas_spring.max_compression_m) {
    throw OutOfRange("cannot insert: interference of " + format_g(-clearance_m * 1000.0) +
                     " mm exceeds the gas-spring stroke of " +
                     format_g(leg.gas_spring.max_compression_m * 1000.0) + " mm");
  }
  return leg.gas_spring.preload_N;
}

double insertion_force_required(const MaintenanceUnit& unit, const PipeEnvironment& pipe,
                                bool top_legs_lowered) {
  return insertion_force_for_clearance(unit.legs.front(),
                                       insertion_clearance(unit, pipe, top_legs_lowered));
}

WheeledLeg lower_leg(const WheeledLeg& leg, double target_angle_rad) {
  if (!leg.has_lower_actuator) {
    throw StateError("leg " + std::to_string(leg.id) + ": no lowering actuator");
  }
  if (leg.angle_latch.state() != latch::LatchState::Housed) {
    throw StateError("leg " + std::to_string(leg.id) + ": angle latch engaged (" +
                     std::string(latch::to_string(leg.angle_latch.state())) + ")");
  }
  if (leg.pressed) {
    throw StateError("leg " + std::to_string(leg.id) + ": wheel pressed against the pipe wall");
  }
  if (!(target_angle_rad >= 0.0 && target_angle_rad <= kPi / 2.0)) {
    throw OutOfRange("leg " + std::to_string(leg.id) + ": hinge angle must lie in [0, 90] degrees");
  }
  WheeledLeg out = leg;
  out.hinge_angle_rad = target_angle_rad;
  return out;
}

// -----------------------------
// Wall press
// -----------------------------
WallPressResult wall_press(const MaintenanceUnit& unit, const PipeEnvironment& pipe) {
  pipe.validate();
  WallPressResult r{unit, {}, false};
  for (std::size_t i = 0; i < kLegCount; ++i) {
    WheeledLeg& leg = r.unit.legs[i];
    if (leg.lowered()) {
      throw StateError("leg " + std::to_string(leg.id) + ": hinge not perpendicular");
    }
    if (leg.flat_latch.state() != latch::LatchState::Housed) {
      throw StateError("leg " + std::to_string(leg.id) + ": extension frozen by the flat latch");
    }
    const double ext_mm = to_mm(pipe.inner_diameter_m) / 2.0 - unit.geometry.reach_mm(0.0) +
                          to_mm(leg.gas_spring.max_compression_m);
    const double ext_m = ext_mm / 1000.0;
    if (ext_m < 0.0 || ext_m > leg.extend_actuator.max_travel_m) {
      throw OutOfRange("leg " + std::to_string(leg.id) + ": required extension " + format_g(ext_mm) +
                       " mm outside actuator travel [0, " +
                       format_g(to_mm(leg.extend_actuator.max_travel_m)) + "] mm");
    }
    leg.extension_m = ext_m;
    leg.pressed = true;
    r.extension_m[i] = ext_m;
  }
  r.centered = is_centered(r.unit);
  return r;
}

bool is_centered(const MaintenanceUnit& unit) {
  for (std::size_t ring = 0; ring < 2; ++ring) {
    const auto& first = unit.legs[ring * 3];
    for (std::size_t k = 1; k < 3; ++k) {
      const auto& leg = unit.legs[ring * 3 + k];
      if (leg.extension_m != first.extension_m || leg.pressed != first.pressed) return false;
    }
  }
  return true;
}

// -----------------------------
// Load path
// -----------------------------
LoadPath leg_load_path(const WheeledLeg& leg, double external_force_N) {
  if (!(external_force_N >= 0.0)) throw OutOfRange("load path: external force must be non-negative");
  LoadPath p;
  if (leg.flat_latch.state() == latch::LatchState::Latched) {
    p.structure_share_N = external_force_N;
    p.bracket = check_bracket_load(leg.flat_bracket, external_force_N, leg.load_lever_arm_m);
    p.tslot = check_tslot_holding(external_force_N);
    if (!p.bracket->passed) {
      p.failures.push_back("bracket " + std::string(to_string(leg.flat_bracket.designation)) + " " +
                           std::string(to_string(p.bracket->governing_constraint)));
    }
    if (!p.tslot->passed) p.failures.push_back("t-slot nut overload");
    if (external_force_N > 0.0) {
      p.plate = plate_bending_safety_factor(leg.flat_plate, leg.material, external_force_N,
                                            leg.load_lever_arm_m);
      if (p.plate->failed()) p.failures.push_back("plate safety factor below 1");
    }
  } else {
    p.actuator_share_N = external_force_N;
    if (external_force_N > leg.extend_actuator.max_load_N) p.failures.push_back("actuator overload");
  }
  p.passed = p.failures.empty();
  return p;
}

// -----------------------------
// Export
// -----------------------------
void write_leg_csv(std::ostream& out, const MaintenanceUnit& unit) {
  out << "leg_id,azimuth_deg,hinge_deg,extension_m,angle_latch,flat_latch\n";
  for (const auto& leg : unit.legs) {
    out << leg.id << ',' << format_g(leg.azimuth_deg) << ',' << format_g(rad_to_deg(leg.hinge_angle_rad))
        << ',' << format_g(leg.extension_m) << ',' << latch::to_string(leg.angle_latch.state()) << ','
        << latch::to_string(leg.flat_latch.state()) << '\n';
  }
}

namespace {

void serialize_latch(std::ostream& out, const latch::LatchFsm& f) {
  out << latch::to_string(f.state()) << ' ' << format_g(f.screw_tip_position_m(), 17) << ' '
      << format_g(f.clamp_torque_Nm(), 17) << ' ' << latch::to_string(f.drive().direction) << ' '
      << format_g(f.drive().voltage_V, 17) << ' ' << format_g(f.current_A(), 17);
}

}  // namespace

std::string canonical_serialize(const MaintenanceUnit& unit) {
  std::ostringstream out;
  out << "in_pipe=" << (unit.in_pipe ? 1 : 0) << ";geometry=" << format_g(unit.geometry.hinge_radius_mm, 17)
      << ',' << format_g(unit.geometry.leg_span_mm, 17) << ',' << format_g(unit.geometry.lowered_reach_mm, 17);
  for (const auto& leg : unit.legs) {
    out << ";leg=" << leg.id << ',' << leg.ring << ',' << format_g(leg.azimuth_deg, 17) << ','
        << format_g(leg.hinge_angle_rad, 17) << ',' << format_g(leg.extension_m, 17) << ','
        << (leg.pressed ? 1 : 0) << ",angle:";
    serialize_latch(out, leg.angle_latch);
    out << ",flat:";
    serialize_latch(out, leg.flat_latch);
  }
  return out.str();
}

}  // namespace lammos::dewalop
