#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "lammos/cli.hpp"
#include "lammos/config.hpp"
#include "lammos/dewalop.hpp"
#include "lammos/exo.hpp"
#include "lammos/latch.hpp"
#include "lammos/mechlib.hpp"
#include "lammos/sequence.hpp"

namespace py = pybind11;
using namespace lammos;

namespace {

py::dict trace_dict(const latch::CurrentTrace& trace) {
  std::vector<double> t, i, x;
  std::vector<std::string> s;
  for (const auto& sample : trace.samples) {
    t.push_back(sample.t_s);
    i.push_back(sample.current_A);
    x.push_back(sample.position_m);
    s.emplace_back(latch::to_string(sample.state));
  }
  py::dict d;
  d["t_s"] = t;
  d["current_A"] = i;
  d["position_m"] = x;
  d["state"] = s;
  return d;
}

latch::DriveCommand parse_command(const std::string& direction, double voltage_V) {
  if (direction == "off") return latch::DriveCommand::off();
  if (direction == "clockwise" || direction == "cw") return latch::DriveCommand::clockwise(voltage_V);
  if (direction == "counterclockwise" || direction == "ccw") return latch::DriveCommand::counterclockwise(voltage_V);
  throw InvalidSpec("unknown direction '" + direction + "'");
}

}  // namespace

PYBIND11_MODULE(_lammos, m) {
  m.doc() = "Motorized-screw latch, in-pipe robot reconfiguration and exoskeleton lock models";

  py::register_exception<Error>(m, "LammosError", PyExc_RuntimeError);

  m.def("gcm_to_Nm", &gcm_to_Nm, py::arg("gcm"));
  m.def("Nm_to_gcm", &Nm_to_gcm, py::arg("Nm"));

  m.def(
      "stall_torque_Nm",
      [](double voltage_V) { return MotorSpec::micro_gearmotor_298().at_voltage(voltage_V).stall_torque_Nm; },
      py::arg("voltage_V"));

  m.def(
      "spring_rate_N_per_m", [] { return spring_rate(SpringSpec::lammos_default()); });

  m.def(
      "bracket_check",
      [](const std::string& designation, double force_N, double lever_arm_m) {
        BracketSpec b;
        if (designation == "40x40") b = BracketSpec::angle_40x40();
        else if (designation == "80x80") b = BracketSpec::angle_80x80();
        else if (designation == "160x80") b = BracketSpec::angle_160x80();
        else if (designation == "flat") b = BracketSpec::flat_lammos();
        else throw InvalidSpec("unknown bracket '" + designation + "'");
        const LoadVerdict v = check_bracket_load(b, force_N, lever_arm_m);
        return py::make_tuple(v.passed, std::string(to_string(v.governing_constraint)), v.margin);
      },
      py::arg("designation"), py::arg("force_N"), py::arg("lever_arm_m"));

  m.def(
      "plate_safety_factor",
      [](double load_N, double lever_arm_m, double yield_Pa) {
        MaterialSpec steel;
        steel.yield_strength_Pa = yield_Pa;
        const SafetyResult r = plate_bending_safety_factor(PlateSpec::flat_bracket_plate(), steel, load_N, lever_arm_m);
        return py::make_tuple(r.bending_stress_Pa, r.safety_factor);
      },
      py::arg("load_N"), py::arg("lever_arm_m") = 0.116, py::arg("yield_Pa") = 250e6);

  m.def(
      "latch_cycle",
      [](double latch_V, double unlatch_V, double dt_s) {
        const latch::LatchFsm housed;
        const auto in = latch::actuate(housed, latch::DriveCommand::clockwise(latch_V), dt_s);
        const auto out = latch::actuate(in.final, latch::DriveCommand::counterclockwise(unlatch_V), dt_s,
                                        in.trace.samples.back().t_s);
        latch::CurrentTrace all = in.trace;
        all.samples.insert(all.samples.end(), out.trace.samples.begin(), out.trace.samples.end());
        py::dict d = trace_dict(all);
        d["clamp_torque_Nm"] = in.final.clamp_torque_Nm();
        return d;
      },
      py::arg("latch_V") = 3.0, py::arg("unlatch_V") = 6.0, py::arg("dt_s") = 0.01);

  m.def(
      "simulate_latch",
      [](const std::vector<std::tuple<std::string, double, double>>& schedule, double dt_s) {
        std::vector<latch::ScheduleEntry> entries;
        for (const auto& [dir, volts, dur] : schedule) entries.push_back({parse_command(dir, volts), dur});
        return trace_dict(latch::simulate_trace(latch::LatchFsm{}, entries, dt_s));
      },
      py::arg("schedule"), py::arg("dt_s") = 0.01,
      "Schedule entries are (direction, voltage_V, duration_s); direction is off, cw or ccw.");

  m.def(
      "insertion_clearance_m",
      [](double pipe_diameter_m, bool lowered) {
        return dewalop::insertion_clearance(dewalop::MaintenanceUnit::make(), dewalop::PipeEnvironment{pipe_diameter_m},
                                            lowered);
      },
      py::arg("pipe_diameter_m"), py::arg("lowered"));

  m.def(
      "run_scenario",
      [](const std::string& path) {
        const auto doc = config::load_scenario(path);
        if (doc.kind != config::ScenarioKind::Dewalop) throw InvalidSpec("run_scenario expects a dewalop scenario");
        const auto r = sequence::run_scenario(doc.dewalop);
        py::list log;
        for (const auto& e : r.log.entries()) log.append(py::make_tuple(e.t_s, e.actor, e.event, e.hash));
        py::dict d;
        d["success"] = r.verdict.success;
        d["verdict"] = r.verdict.describe();
        d["log"] = log;
        d["final_hash"] = sequence::snapshot_hash(r.final);
        d["initial_hash"] = sequence::snapshot_hash(doc.dewalop.robot);
        d["end_time_s"] = r.end_time_s;
        return d;
      },
      py::arg("path"));

  m.def(
      "energy_comparison",
      [](double load_Nm, double duration_s, std::optional<double> lock_at_s) {
        const exo::ExoJoint joint;
        const auto c = exo::energy_comparison(joint, exo::LoadTimeline::constant(load_Nm, duration_s), lock_at_s);
        py::dict d;
        d["held_energy_J"] = c.held_energy_J;
        d["locked_energy_J"] = c.locked_energy_J;
        d["latch_energy_J"] = c.latch_energy_J;
        d["savings_J"] = c.savings_J;
        d["lock_at_s"] = c.lock_at_s;
        return d;
      },
      py::arg("load_Nm"), py::arg("duration_s"), py::arg("lock_at_s") = py::none());

  m.def(
      "cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::main(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command-line tool in-process; returns (exit_code, stdout, stderr).");
}
