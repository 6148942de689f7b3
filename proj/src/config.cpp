#include "lammos/config.hpp"

#include <fstream>
#include <sstream>

#include "lammos/mechlib.hpp"

namespace lammos::config {

using nlohmann::json;

namespace {

double mm(double v) { return v / 1000.0; }

const json& object_or_empty(const json& parent, const char* key) {
  static const json empty = json::object();
  auto it = parent.find(key);
  if (it == parent.end()) return empty;
  if (!it->is_object()) throw ParseError(std::string("'") + key + "' must be an object");
  return *it;
}

MotorSpec parse_motor(const json& j, const MotorSpec& fallback) {
  if (j.empty()) return fallback;
  std::vector<MotorAnchor> anchors;
  if (auto it = j.find("anchors"); it != j.end()) {
    for (const auto& a : *it) {
      anchors.push_back({a.at("voltage_V").get<double>(), gcm_to_Nm(a.at("stall_torque_gcm").get<double>()),
                         a.at("free_speed_rev_s").get<double>(), a.at("stall_current_A").get<double>()});
    }
  } else {
    anchors = fallback.anchors();
  }
  return MotorSpec(j.value("gear_ratio", fallback.gear_ratio()), std::move(anchors),
                   j.value("no_load_current_A", fallback.no_load_current_A()));
}

json motor_json(const MotorSpec& m) {
  json anchors = json::array();
  for (const auto& a : m.anchors()) {
    anchors.push_back({{"voltage_V", a.voltage_V},
                       {"stall_torque_gcm", Nm_to_gcm(a.stall_torque_Nm)},
                       {"free_speed_rev_s", a.free_speed_rev_s},
                       {"stall_current_A", a.stall_current_A}});
  }
  return {{"gear_ratio", m.gear_ratio()}, {"anchors", anchors}, {"no_load_current_A", m.no_load_current_A()}};
}

sequence::StepSpec parse_step(const json& j) {
  if (!j.is_object()) throw ParseError("each step must be an object");
  sequence::StepSpec s;
  s.tag = j.at("action").get<std::string>();
  s.action = sequence::parse_action(s.tag);
  if (auto it = j.find("angle_deg"); it != j.end()) s.angle_rad = deg_to_rad(it->get<double>());
  if (auto it = j.find("voltage_V"); it != j.end()) s.voltage_V = it->get<double>();
  s.acknowledge_push = j.value("acknowledge_push", false);
  return s;
}

exo::LoadTimeline parse_timeline(const json& doc, const std::filesystem::path& base_dir) {
  if (auto it = doc.find("timeline_csv"); it != doc.end()) {
    std::filesystem::path p = it->get<std::string>();
    if (p.is_relative()) p = base_dir / p;
    std::ifstream in(p);
    if (!in) throw ParseError("cannot open timeline " + p.string());
    try {
      return exo::read_timeline_csv(in);
    } catch (const Error& e) {
      throw ParseError(e.what());
    }
  }
  exo::LoadTimeline tl;
  for (const auto& row : doc.at("timeline")) {
    if (!row.is_array() || row.size() != 2) throw ParseError("timeline rows must be [t_s, load_Nm]");
    tl.points.push_back({row[0].get<double>(), row[1].get<double>()});
  }
  return tl;
}

}  // namespace

latch::LatchConfig parse_mechanism(const json& mechanism) {
  latch::LatchConfig c = latch::LatchConfig::lammos_default();
  c.motor = parse_motor(object_or_empty(mechanism, "motor"), c.motor);

  const json& screw = object_or_empty(mechanism, "screw");
  c.screw.nominal_diameter_m = mm(screw.value("nominal_diameter_mm", 8.0));
  c.screw.pitch_m = mm(screw.value("pitch_mm", 1.25));
  c.screw.length_m = mm(screw.value("length_mm", 18.0));
  c.screw.thread_friction = screw.value("thread_friction", c.screw.thread_friction);

  const json& spring = object_or_empty(mechanism, "spring");
  c.spring.free_length_m = mm(spring.value("free_length_mm", 19.0));
  c.spring.outer_width_m = mm(spring.value("outer_width_mm", 8.0));
  c.spring.wire_diameter_m = mm(spring.value("wire_diameter_mm", 0.5));
  c.spring.active_coils = spring.value("active_coils", c.spring.active_coils);
  c.spring.shear_modulus_Pa = spring.value("shear_modulus_GPa", 79.3) * 1e9;
  c.spring.max_load_N = spring.value("max_load_N", c.spring.max_load_N);
  c.spring.mass_kg = spring.value("mass_kg", c.spring.mass_kg);
  c.spring.validate();
  if (auto it = spring.find("preload_deflection_mm"); it != spring.end()) {
    c.spring_preload_deflection_m = mm(it->get<double>());
  } else {
    c.spring_preload_deflection_m = c.spring.max_load_N / spring_rate(c.spring);
  }

  const json& latch = object_or_empty(mechanism, "latch");
  c.flexnut_friction_torque_Nm = latch.value("flexnut_friction_torque_Nm", c.flexnut_friction_torque_Nm);
  c.bracket_thickness_m = mm(latch.value("bracket_thickness_mm", 9.0));
  c.tslot_gap_m = mm(latch.value("tslot_gap_mm", 4.0));
  c.housed_overhang_m = mm(latch.value("housed_overhang_mm", 2.0));
  c.tightening_current_threshold = latch.value("tightening_current_threshold", c.tightening_current_threshold);
  c.clamp_torque_rate_Nm_per_m = latch.value("clamp_torque_rate_Nm_per_m", c.clamp_torque_rate_Nm_per_m);
  c.breakaway_factor = latch.value("breakaway_factor", c.breakaway_factor);
  c.validate();
  return c;
}

json mechanism_json(const latch::LatchConfig& c) {
  return {
      {"motor", motor_json(c.motor)},
      {"screw",
       {{"nominal_diameter_mm", c.screw.nominal_diameter_m * 1000.0},
        {"pitch_mm", c.screw.pitch_m * 1000.0},
        {"length_mm", c.screw.length_m * 1000.0},
        {"thread_friction", c.screw.thread_friction}}},
      {"spring",
       {{"free_length_mm", c.spring.free_length_m * 1000.0},
        {"outer_width_mm", c.spring.outer_width_m * 1000.0},
        {"wire_diameter_mm", c.spring.wire_diameter_m * 1000.0},
        {"active_coils", c.spring.active_coils},
        {"shear_modulus_GPa", c.spring.shear_modulus_Pa / 1e9},
        {"max_load_N", c.spring.max_load_N},
        {"mass_kg", c.spring.mass_kg},
        {"preload_deflection_mm", c.spring_preload_deflection_m * 1000.0}}},
      {"latch",
       {{"flexnut_friction_torque_Nm", c.flexnut_friction_torque_Nm},
        {"bracket_thickness_mm", c.bracket_thickness_m * 1000.0},
        {"tslot_gap_mm", c.tslot_gap_m * 1000.0},
        {"housed_overhang_mm", c.housed_overhang_m * 1000.0},
        {"tightening_current_threshold", c.tightening_current_threshold},
        {"clamp_torque_rate_Nm_per_m", c.clamp_torque_rate_Nm_per_m},
        {"breakaway_factor", c.breakaway_factor}}},
  };
}

ScenarioDocument parse_scenario(const std::string& text, const std::filesystem::path& base_dir) {
  try {
    const json doc = json::parse(text);
    if (!doc.is_object()) throw ParseError("scenario must be a JSON object");
    ScenarioDocument out;
    const std::string type = doc.value("type", std::string("dewalop"));
    const latch::LatchConfig mech = parse_mechanism(object_or_empty(doc, "mechanism"));

    if (type == "dewalop") {
      out.kind = ScenarioKind::Dewalop;
      sequence::Scenario& s = out.dewalop;
      s.name = doc.value("name", s.name);
      s.dt_s = doc.value("dt_s", s.dt_s);
      s.latch_voltage_V = doc.value("latch_voltage_V", s.latch_voltage_V);
      s.unlatch_voltage_V = doc.value("unlatch_voltage_V", s.unlatch_voltage_V);
      s.actuation_timeout_s = doc.value("actuation_timeout_s", s.actuation_timeout_s);
      s.pipe.inner_diameter_m = mm(object_or_empty(doc, "pipe").value("inner_diameter_mm", 800.0));
      const json& robot = object_or_empty(doc, "robot");
      dewalop::LegGeometry g;
      g.hinge_radius_mm = robot.value("hinge_radius_mm", g.hinge_radius_mm);
      g.leg_span_mm = robot.value("leg_span_mm", g.leg_span_mm);
      g.lowered_reach_mm = robot.value("lowered_reach_mm", g.lowered_reach_mm);
      s.robot = dewalop::MaintenanceUnit::make(mech, g);
      if (auto it = doc.find("steps"); it != doc.end()) {
        if (!it->is_array()) throw ParseError("'steps' must be an array");
        for (const auto& step : *it) s.steps.push_back(parse_step(step));
      }
    } else if (type == "exo") {
      out.kind = ScenarioKind::Exo;
      ExoScenario& e = out.exo;
      e.name = doc.value("name", e.name);
      const json& joint = object_or_empty(doc, "joint");
      e.joint.motor = parse_motor(object_or_empty(joint, "motor"), e.joint.motor);
      e.joint.supply_voltage_V = joint.value("supply_voltage_V", e.joint.supply_voltage_V);
      e.joint.standby_power_W = joint.value("standby_power_W", e.joint.standby_power_W);
      e.joint.load_torque_Nm = joint.value("load_torque_Nm", e.joint.load_torque_Nm);
      e.joint.latch_voltage_V = joint.value("latch_voltage_V", e.joint.latch_voltage_V);
      e.joint.latch_dt_s = doc.value("dt_s", e.joint.latch_dt_s);
      e.joint.lock = latch::LatchFsm(mech);
      e.timeline = parse_timeline(doc, base_dir);
      if (auto it = doc.find("lock_at_s"); it != doc.end() && !it->is_null()) e.lock_at_s = it->get<double>();
      try {
        e.timeline.validate();
        e.joint.validate();
      } catch (const Error& err) {
        throw ParseError(err.what());
      }
    } else if (type == "latch_fuzz") {
      out.kind = ScenarioKind::LatchFuzz;
      FuzzScenario& f = out.fuzz;
      f.name = doc.value("name", f.name);
      f.latch = mech;
      f.commands = doc.value("commands", f.commands);
      f.max_command_s = doc.value("max_command_s", f.max_command_s);
      f.dt_s = doc.value("dt_s", f.dt_s);
      if (f.commands < 0 || !(f.max_command_s > 0.0) || !(f.dt_s > 0.0)) {
        throw ParseError("latch_fuzz: commands, max_command_s and dt_s must be positive");
      }
    } else {
      throw ParseError("unknown scenario type '" + type + "'");
    }
    return out;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed scenario: ") + e.what());
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.what());
  }
}

ScenarioDocument load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str(), path.parent_path());
}

json defaults_json() {
  const latch::LatchConfig c = latch::LatchConfig::lammos_default();
  const dewalop::LegGeometry g;
  const dewalop::WheeledLeg leg;
  const exo::ExoJoint joint;
  json out;
  out["mechanism"] = mechanism_json(c);
  out["robot"] = {{"hinge_radius_mm", g.hinge_radius_mm},
                  {"leg_span_mm", g.leg_span_mm},
                  {"lowered_reach_mm", g.lowered_reach_mm},
                  {"lowering_angle_deg", rad_to_deg(g.lowering_angle_rad())},
                  {"gas_spring_preload_N", leg.gas_spring.preload_N},
                  {"gas_spring_max_compression_mm", leg.gas_spring.max_compression_m * 1000.0},
                  {"extend_actuator_max_load_N", leg.extend_actuator.max_load_N},
                  {"extend_actuator_travel_mm", leg.extend_actuator.max_travel_m * 1000.0},
                  {"load_lever_arm_m", leg.load_lever_arm_m}};
  out["structure"] = {{"plate_mm", {leg.flat_plate.length_m * 1000.0, leg.flat_plate.height_m * 1000.0,
                                    leg.flat_plate.thickness_m * 1000.0}},
                      {"yield_Pa", leg.material.yield_strength_Pa},
                      {"tslot_limit_N", kTSlotHoldingLimit_N}};
  out["exo"] = {{"supply_voltage_V", joint.supply_voltage_V},
                {"standby_power_W", joint.standby_power_W},
                {"latch_voltage_V", joint.latch_voltage_V},
                {"dt_s", joint.latch_dt_s}};
  out["sequence"] = {{"dt_s", 0.01}, {"latch_voltage_V", 3.0}, {"unlatch_voltage_V", 6.0}};
  // Values with no measured source; chosen as typical and open to override.
  out["not_measured"] = {"mechanism.motor.anchors[].free_speed_rev_s",
                         "mechanism.motor.anchors[].stall_current_A",
                         "mechanism.motor.no_load_current_A",
                         "mechanism.screw.thread_friction",
                         "mechanism.latch.flexnut_friction_torque_Nm",
                         "mechanism.latch.tightening_current_threshold",
                         "mechanism.latch.clamp_torque_rate_Nm_per_m",
                         "mechanism.latch.breakaway_factor",
                         "mechanism.latch.tslot_gap_mm",
                         "mechanism.latch.housed_overhang_mm",
                         "robot.hinge_radius_mm",
                         "robot.leg_span_mm",
                         "robot.lowering_angle_deg",
                         "structure.yield_Pa",
                         "exo.standby_power_W"};
  return out;
}

}  // namespace lammos::config
