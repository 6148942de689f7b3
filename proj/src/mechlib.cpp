#include "lammos/mechlib.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lammos/errors.hpp"

namespace lammos {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidSpec(what);
}

double lerp(double a, double b, double t) { return (1.0 - t) * a + t * b; }

}  // namespace

// -----------------------------
// Motor
// -----------------------------
MotorSpec::MotorSpec(double gear_ratio, std::vector<MotorAnchor> anchors, double no_load_current_A)
    : gear_ratio_(gear_ratio), anchors_(std::move(anchors)), no_load_current_A_(no_load_current_A) {
  require(gear_ratio_ > 0.0, "motor: gear ratio must be positive");
  require(anchors_.size() >= 2, "motor: at least two voltage anchors are required");
  require(no_load_current_A_ >= 0.0, "motor: no-load current must be non-negative");
  for (std::size_t i = 0; i < anchors_.size(); ++i) {
    const auto& a = anchors_[i];
    require(a.stall_torque_Nm > 0.0, "motor: stall torque must be positive at every anchor");
    require(a.free_speed_rev_s > 0.0, "motor: free speed must be positive at every anchor");
    require(a.stall_current_A > no_load_current_A_,
            "motor: stall current must exceed the no-load current");
    if (i > 0) {
      require(a.voltage_V > anchors_[i - 1].voltage_V,
              "motor: anchors must be strictly increasing in voltage");
    }
  }
}

MotorSpec MotorSpec::micro_gearmotor_298() {
  return MotorSpec(298.0,
                   {{3.0, gcm_to_Nm(2884.0), 0.75, 0.7}, {6.0, gcm_to_Nm(3444.0), 1.6, 1.6}},
                   0.04);
}

MotorAnchor MotorSpec::at_voltage(double voltage_V) const {
  if (!(voltage_V >= min_voltage_V() && voltage_V <= max_voltage_V())) {
    throw OutOfRange("motor: supply voltage " + std::to_string(voltage_V) +
                     " V outside characterised range [" + std::to_string(min_voltage_V()) + ", " +
                     std::to_string(max_voltage_V()) + "] V");
  }
  auto hi = std::lower_bound(anchors_.begin(), anchors_.end(), voltage_V,
                             [](const MotorAnchor& a, double v) { return a.voltage_V < v; });
  if (hi->voltage_V == voltage_V) return *hi;
  auto lo = std::prev(hi);
  const double t = (voltage_V - lo->voltage_V) / (hi->voltage_V - lo->voltage_V);
  return {voltage_V, lerp(lo->stall_torque_Nm, hi->stall_torque_Nm, t),
          lerp(lo->free_speed_rev_s, hi->free_speed_rev_s, t),
          lerp(lo->stall_current_A, hi->stall_current_A, t)};
}

OperatingPoint motor_operating_point(const MotorSpec& motor, double supply_voltage_V,
                                     double load_torque_Nm) {
  if (!(load_torque_Nm >= 0.0)) throw OutOfRange("motor: load torque must be non-negative");
  const MotorAnchor a = motor.at_voltage(supply_voltage_V);
  const double fraction = load_torque_Nm / a.stall_torque_Nm;
  OperatingPoint op;
  op.stall_torque_Nm = a.stall_torque_Nm;
  op.stalled = load_torque_Nm >= a.stall_torque_Nm;
  op.speed_rev_s = std::max(0.0, a.free_speed_rev_s * (1.0 - fraction));
  op.current_A = motor.no_load_current_A() +
                 (a.stall_current_A - motor.no_load_current_A()) * std::min(fraction, 1.0);
  return op;
}

// -----------------------------
// Screw
// -----------------------------
ScrewSpec ScrewSpec::m8x18(double thread_friction) {
  ScrewSpec s;
  s.thread_friction = thread_friction;
  return s;
}

void ScrewSpec::validate() const {
  require(nominal_diameter_m > 0.0, "screw: diameter must be positive");
  require(pitch_m > 0.0, "screw: pitch must be positive");
  require(length_m > 0.0, "screw: length must be positive");
  require(thread_friction >= 0.0 && thread_friction < 1.0,
          "screw: thread friction must lie in [0, 1)");
}

// T = F * d_m/2 * (L + pi mu d_m) / (pi d_m - mu L)
double screw_torque_for_force(const ScrewSpec& screw, double axial_force_N) {
  const double dm = screw.mean_diameter_m();
  const double lead = screw.pitch_m;
  const double mu = screw.thread_friction;
  return axial_force_N * dm / 2.0 * (lead + kPi * mu * dm) / (kPi * dm - mu * lead);
}

double screw_axial_force(const ScrewSpec& screw, double applied_torque_Nm) {
  if (!(applied_torque_Nm >= 0.0)) throw OutOfRange("screw: torque must be non-negative");
  const double dm = screw.mean_diameter_m();
  const double lead = screw.pitch_m;
  const double mu = screw.thread_friction;
  return 2.0 * applied_torque_Nm / dm * (kPi * dm - mu * lead) / (lead + kPi * mu * dm);
}

// Lowering torque T = F * d_m/2 * (pi mu d_m - L) / (pi d_m + mu L); negative means the
// thread overhauls and the push turns the screw.
double screw_backdrive_torque(const ScrewSpec& screw, double axial_force_N) {
  if (!(axial_force_N >= 0.0)) throw OutOfRange("screw: axial force must be non-negative");
  const double dm = screw.mean_diameter_m();
  const double lead = screw.pitch_m;
  const double mu = screw.thread_friction;
  const double overhaul = axial_force_N * dm / 2.0 * (lead - kPi * mu * dm) / (kPi * dm + mu * lead);
  return std::max(0.0, overhaul);
}

// -----------------------------
// Spring
// -----------------------------
void SpringSpec::validate() const {
  require(free_length_m > 0.0, "spring: free length must be positive");
  require(wire_diameter_m > 0.0, "spring: wire diameter must be positive");
  require(outer_width_m > wire_diameter_m, "spring: outer width must exceed wire diameter");
  require(active_coils > 0.0, "spring: active coil count must be positive");
  require(shear_modulus_Pa > 0.0, "spring: shear modulus must be positive");
  require(max_load_N > 0.0, "spring: maximum load must be positive");
}

double spring_rate(const SpringSpec& spring) {
  const double d = spring.wire_diameter_m;
  const double D = spring.mean_coil_diameter_m();
  return spring.shear_modulus_Pa * d * d * d * d / (8.0 * D * D * D * spring.active_coils);
}

double spring_force(const SpringSpec& spring, double deflection_m) {
  if (!(deflection_m >= 0.0)) throw OutOfRange("spring: deflection must be non-negative");
  const double force = spring_rate(spring) * deflection_m;
  // k * (F_max / k) can land one ulp above F_max.
  if (force > spring.max_load_N * (1.0 + 1e-12)) {
    throw Overload("spring: force " + std::to_string(force) + " N exceeds maximum load " +
                   std::to_string(spring.max_load_N) + " N");
  }
  return std::min(force, spring.max_load_N);
}

// -----------------------------
// Structure
// -----------------------------
std::string_view to_string(BracketType type) {
  switch (type) {
    case BracketType::Angle40x40: return "40x40";
    case BracketType::Angle80x80: return "80x80";
    case BracketType::Angle160x80: return "160x80";
    case BracketType::Flat: return "flat";
  }
  return "?";
}

std::string_view to_string(LoadConstraint constraint) {
  switch (constraint) {
    case LoadConstraint::ForceLimit: return "force-limit";
    case LoadConstraint::MomentLimit: return "moment-limit";
    case LoadConstraint::TSlotLimit: return "tslot-limit";
  }
  return "?";
}

void BracketSpec::validate() const {
  require(max_force_N > 0.0, "bracket: force limit must be positive");
  require(max_moment_Nm > 0.0, "bracket: moment limit must be positive");
}

LoadVerdict check_bracket_load(const BracketSpec& bracket, double force_N, double lever_arm_m) {
  if (!(force_N >= 0.0) || !(lever_arm_m >= 0.0)) {
    throw OutOfRange("bracket: force and lever arm must be non-negative");
  }
  const double moment = force_N * lever_arm_m;
  const double force_margin = force_N > 0.0 ? bracket.max_force_N / force_N : kUnboundedMargin;
  const double moment_margin = moment > 0.0 ? bracket.max_moment_Nm / moment : kUnboundedMargin;

  LoadVerdict v;
  v.passed = force_N < bracket.max_force_N && moment < bracket.max_moment_Nm;
  if (moment_margin < force_margin) {
    v.governing_constraint = LoadConstraint::MomentLimit;
    v.margin = moment_margin;
  } else {
    v.governing_constraint = LoadConstraint::ForceLimit;
    v.margin = force_margin;
  }
  return v;
}

LoadVerdict check_tslot_holding(double force_N) {
  if (!(force_N >= 0.0)) throw OutOfRange("t-slot: force must be non-negative");
  LoadVerdict v;
  v.governing_constraint = LoadConstraint::TSlotLimit;
  v.passed = force_N <= kTSlotHoldingLimit_N;
  v.margin = force_N > 0.0 ? kTSlotHoldingLimit_N / force_N : kUnboundedMargin;
  return v;
}

void PlateSpec::validate() const {
  require(length_m > 0.0 && height_m > 0.0 && thickness_m > 0.0,
          "plate: all dimensions must be positive");
}

double PlateSpec::section_modulus_m3() const {
  if (bending_axis == BendingAxis::AboutThickness) {
    return thickness_m * height_m * height_m / 6.0;
  }
  return height_m * thickness_m * thickness_m / 6.0;
}

void MaterialSpec::validate() const {
  require(yield_strength_Pa > 0.0, "material: yield strength must be positive");
}

SafetyResult plate_bending_safety_factor(const PlateSpec& plate, const MaterialSpec& material,
                                         double load_N, double lever_arm_m) {
  plate.validate();
  material.validate();
  if (!(load_N > 0.0)) throw OutOfRange("plate: load must be positive (safety factor undefined)");
  if (!(lever_arm_m > 0.0)) throw OutOfRange("plate: lever arm must be positive");
  SafetyResult r;
  r.bending_stress_Pa = load_N * lever_arm_m / plate.section_modulus_m3();
  r.safety_factor = material.yield_strength_Pa / r.bending_stress_Pa;
  return r;
}

}  // namespace lammos
