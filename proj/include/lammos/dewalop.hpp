#pragma once

#include <array>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "lammos/latch.hpp"
#include "lammos/mechlib.hpp"

namespace lammos::dewalop {

inline constexpr double kMinPipeDiameter_m = 0.800;
inline constexpr double kMaxPipeDiameter_m = 1.000;

struct PipeEnvironment {
  double inner_diameter_m = 0.800;

  bool in_operating_range() const {
    return inner_diameter_m >= kMinPipeDiameter_m && inner_diameter_m <= kMaxPipeDiameter_m;
  }
  /// Throws OutOfRange outside 800-1000 mm.
  void validate() const;

  bool operator==(const PipeEnvironment&) const = default;
};

struct GasSpring {
  double preload_N = 400.0;
  double max_compression_m = 0.030;

  bool operator==(const GasSpring&) const = default;
};

struct ExtendActuator {
  double max_load_N = 1000.0;
  double max_travel_m = 0.100;

  bool operator==(const ExtendActuator&) const = default;
};

/// Radial geometry shared by all legs, in millimetres (the drawings are dimensioned in
/// mm and the clearances come out exact in that unit).
///
/// Wheel reach from the unit axis with the gas spring free and no extension is
/// hinge_radius + leg_span * cos(hinge_angle).
struct LegGeometry {
  double hinge_radius_mm = 200.0;
  double leg_span_mm = 230.0;
  // Top-leg reach once lowered. Anchors the lowering angle: 116 mm clearance in the
  // 800 mm pipe.
  double lowered_reach_mm = 284.0;

  void validate() const;
  /// Fitted hinge angle that produces lowered_reach_mm.
  double lowering_angle_rad() const;
  /// Reach at a hinge angle, quantised to 1 nm.
  double reach_mm(double hinge_angle_rad) const;

  bool operator==(const LegGeometry&) const = default;
};

struct WheeledLeg {
  int id = 0;
  int ring = 0;
  double azimuth_deg = 0.0;

  double hinge_angle_rad = 0.0;  // 0 = perpendicular to the unit axis
  double extension_m = 0.0;
  bool pressed = false;  // wheel in contact with the pipe wall

  GasSpring gas_spring;
  ExtendActuator extend_actuator;
  bool has_lower_actuator = false;

  latch::LatchFsm angle_latch;  // right-angle LaMMos (replaces the 80x80 bracket)
  latch::LatchFsm flat_latch;   // flat LaMMos tying the leg profile to the base profile

  BracketSpec angle_bracket = BracketSpec::angle_80x80();
  BracketSpec flat_bracket = BracketSpec::flat_lammos();
  PlateSpec flat_plate = PlateSpec::flat_bracket_plate();
  MaterialSpec material = MaterialSpec::mild_steel();
  double load_lever_arm_m = 0.116;

  bool lowered() const { return hinge_angle_rad != 0.0; }
  bool is_top() const { return azimuth_deg == 0.0; }

  bool operator==(const WheeledLeg&) const = default;
};

inline constexpr std::size_t kLegCount = 6;

/// Six wheeled legs in two rings of three at 0/120/240 degrees; azimuth 0 points up.
/// Only the top leg of each ring carries a lowering actuator.
struct MaintenanceUnit {
  std::array<WheeledLeg, kLegCount> legs;
  LegGeometry geometry;
  bool in_pipe = false;

  static MaintenanceUnit make(const latch::LatchConfig& latch_config = latch::LatchConfig::lammos_default(),
                              const LegGeometry& geometry = {});

  void validate() const;

  bool operator==(const MaintenanceUnit&) const = default;
};

/// Radial gap between the top-leg wheels and the pipe wall for a hypothetical leg
/// configuration (top legs at the lowering angle or perpendicular). Negative values
/// mean interference.
double insertion_clearance(const MaintenanceUnit& unit, const PipeEnvironment& pipe,
                           bool top_legs_lowered);

/// Same gap for the unit's actual hinge angles (worst top leg).
double current_clearance(const MaintenanceUnit& unit, const PipeEnvironment& pipe);

/// Push needed per interfering leg. Throws OutOfRange when the gas spring stroke
/// cannot absorb the interference.
double insertion_force_required(const MaintenanceUnit& unit, const PipeEnvironment& pipe,
                                bool top_legs_lowered);
double insertion_force_for_clearance(const WheeledLeg& leg, double clearance_m);

/// Rotates the leg about its base hinge. Refused while the angle latch is not housed.
WheeledLeg lower_leg(const WheeledLeg& leg, double target_angle_rad);

struct WallPressResult {
  MaintenanceUnit unit;
  std::array<double, kLegCount> extension_m{};
  bool centered = false;
};

/// Extends every leg until its wheel presses the wall with the gas spring fully
/// compressed. Requires all hinges at 0 and no flat latch engaged.
WallPressResult wall_press(const MaintenanceUnit& unit, const PipeEnvironment& pipe);

/// True when the extensions within each ring are identical.
bool is_centered(const MaintenanceUnit& unit);

struct LoadPath {
  double actuator_share_N = 0.0;
  double structure_share_N = 0.0;
  bool passed = true;
  std::vector<std::string> failures;
  std::optional<LoadVerdict> bracket;
  std::optional<LoadVerdict> tslot;
  std::optional<SafetyResult> plate;
};

/// Binary load split: a latched flat LaMMos sends the whole force through the
/// structure, otherwise the extend actuator carries it. Limits are reported, not thrown.
LoadPath leg_load_path(const WheeledLeg& leg, double external_force_N);

/// `leg_id,azimuth_deg,hinge_deg,extension_m,angle_latch,flat_latch`
void write_leg_csv(std::ostream& out, const MaintenanceUnit& unit);

/// Field-ordered text form of the unit; input of the event-log snapshot hash.
std::string canonical_serialize(const MaintenanceUnit& unit);

}  // namespace lammos::dewalop
