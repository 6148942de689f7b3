#pragma once

#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace lammos {

// -----------------------------
// Units
// -----------------------------
inline constexpr double kStandardGravity = 9.80665;  // m/s^2
inline constexpr double kPi = 3.14159265358979323846;

/// gram-force centimetre (the usual datasheet unit for micro gearmotors) to N*m.
constexpr double gcm_to_Nm(double gcm) { return gcm * 1e-3 * kStandardGravity * 1e-2; }
constexpr double Nm_to_gcm(double nm) { return nm / (1e-3 * kStandardGravity * 1e-2); }

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

// Reported in place of an infinite margin (zero applied load).
inline constexpr double kUnboundedMargin = std::numeric_limits<double>::max();

// -----------------------------
// Drivetrain
// -----------------------------

/// One characterised supply voltage of a geared DC motor. All values at the gearbox output.
struct MotorAnchor {
  double voltage_V = 0.0;
  double stall_torque_Nm = 0.0;
  double free_speed_rev_s = 0.0;
  double stall_current_A = 0.0;

  bool operator==(const MotorAnchor&) const = default;
};

/// Geared DC motor described by a few voltage anchors; values in between are
/// interpolated piecewise-linearly, never extrapolated.
class MotorSpec {
 public:
  MotorSpec(double gear_ratio, std::vector<MotorAnchor> anchors, double no_load_current_A);

  /// 298:1 micro metal gearmotor: 2884 g*cm @ 3 V, 3444 g*cm @ 6 V. Free speeds and
  /// currents are typical catalogue values for this gearbox class, not measured ones.
  static MotorSpec micro_gearmotor_298();

  double gear_ratio() const { return gear_ratio_; }
  const std::vector<MotorAnchor>& anchors() const { return anchors_; }
  double no_load_current_A() const { return no_load_current_A_; }
  double min_voltage_V() const { return anchors_.front().voltage_V; }
  double max_voltage_V() const { return anchors_.back().voltage_V; }

  /// Throws OutOfRange outside [min_voltage_V, max_voltage_V].
  MotorAnchor at_voltage(double voltage_V) const;

  bool operator==(const MotorSpec&) const = default;

 private:
  double gear_ratio_;
  std::vector<MotorAnchor> anchors_;
  double no_load_current_A_;
};

struct OperatingPoint {
  double speed_rev_s = 0.0;
  double current_A = 0.0;
  bool stalled = false;
  double stall_torque_Nm = 0.0;  // available at this voltage
};

/// Steady state on the linear torque-speed line for a load torque at the gearbox output.
OperatingPoint motor_operating_point(const MotorSpec& motor, double supply_voltage_V,
                                     double load_torque_Nm);

enum class ScrewHead { Hexagonal, SocketCap };

struct ScrewSpec {
  double nominal_diameter_m = 0.008;
  double pitch_m = 0.00125;  // M8 coarse
  double length_m = 0.018;
  double thread_friction = 0.15;
  ScrewHead head = ScrewHead::Hexagonal;

  /// M8 x 18 hexagonal head screw.
  static ScrewSpec m8x18(double thread_friction = 0.15);

  void validate() const;
  double mean_diameter_m() const { return 0.9 * nominal_diameter_m; }

  bool operator==(const ScrewSpec&) const = default;
};

/// Axial clamp force produced by a tightening torque (square-thread power screw).
double screw_axial_force(const ScrewSpec& screw, double applied_torque_Nm);

/// Torque needed to raise an axial load through the thread; inverse of screw_axial_force.
double screw_torque_for_force(const ScrewSpec& screw, double axial_force_N);

/// Torque an axial push induces on the screw when nothing drives it. Zero for a
/// self-locking thread (pi * mu * d_m >= lead).
double screw_backdrive_torque(const ScrewSpec& screw, double axial_force_N);

// -----------------------------
// Spring
// -----------------------------
struct SpringSpec {
  double free_length_m = 0.019;
  double outer_width_m = 0.008;
  double wire_diameter_m = 0.0005;
  double active_coils = 28.0;
  double shear_modulus_Pa = 79.3e9;  // stainless steel
  double max_load_N = 4.506;
  double mass_kg = 0.000406;

  static SpringSpec lammos_default() { return {}; }

  void validate() const;
  double mean_coil_diameter_m() const { return outer_width_m - wire_diameter_m; }

  bool operator==(const SpringSpec&) const = default;
};

double spring_rate(const SpringSpec& spring);

/// Linear spring force; throws Overload above max_load_N.
double spring_force(const SpringSpec& spring, double deflection_m);

// -----------------------------
// Structure
// -----------------------------
enum class BracketType { Angle40x40, Angle80x80, Angle160x80, Flat };

std::string_view to_string(BracketType type);

struct BracketSpec {
  BracketType designation = BracketType::Angle80x80;
  double max_force_N = 2000.0;
  double max_moment_Nm = 150.0;

  static BracketSpec angle_40x40() { return {BracketType::Angle40x40, 1000.0, 50.0}; }
  static BracketSpec angle_80x80() { return {BracketType::Angle80x80, 2000.0, 150.0}; }
  static BracketSpec angle_160x80() { return {BracketType::Angle160x80, 2000.0, 150.0}; }
  // Flat LaMMos plate screwed into a T-slot nut: force bounded by the nut (5000 N),
  // moment by first yield of the 116x40x9 mm plate at 250 MPa (Z = 2.4e-6 m^3).
  static BracketSpec flat_lammos() { return {BracketType::Flat, 5000.0, 600.0}; }

  void validate() const;

  bool operator==(const BracketSpec&) const = default;
};

enum class LoadConstraint { ForceLimit, MomentLimit, TSlotLimit };

std::string_view to_string(LoadConstraint constraint);

struct LoadVerdict {
  bool passed = true;
  LoadConstraint governing_constraint = LoadConstraint::ForceLimit;
  double margin = kUnboundedMargin;
};

/// Strict envelope check: F < max_force and F*l < max_moment.
LoadVerdict check_bracket_load(const BracketSpec& bracket, double force_N, double lever_arm_m);

inline constexpr double kTSlotHoldingLimit_N = 5000.0;

/// Inclusive: the nut holds up to and including 5000 N.
LoadVerdict check_tslot_holding(double force_N);

enum class BendingAxis { AboutThickness, AboutHeight };

struct PlateSpec {
  double length_m = 0.116;
  double height_m = 0.040;
  double thickness_m = 0.009;
  BendingAxis bending_axis = BendingAxis::AboutThickness;

  static PlateSpec flat_bracket_plate() { return {}; }

  void validate() const;
  double section_modulus_m3() const;

  bool operator==(const PlateSpec&) const = default;
};

struct MaterialSpec {
  std::string name = "mild steel";
  double yield_strength_Pa = 250e6;
  double shear_modulus_Pa = 79.3e9;

  static MaterialSpec mild_steel() { return {}; }

  void validate() const;

  bool operator==(const MaterialSpec&) const = default;
};

struct SafetyResult {
  double bending_stress_Pa = 0.0;
  double safety_factor = 0.0;

  bool failed() const { return safety_factor < 1.0; }
};

/// Cantilever bending of the plate: sigma = F*l/Z, SF = yield/sigma.
SafetyResult plate_bending_safety_factor(const PlateSpec& plate, const MaterialSpec& material,
                                         double load_N, double lever_arm_m);

}  // namespace lammos
