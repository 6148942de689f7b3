#include "lammos/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "lammos/config.hpp"
#include "lammos/exo.hpp"
#include "lammos/format.hpp"
#include "lammos/latch.hpp"
#include "lammos/sequence.hpp"

namespace lammos::cli {

namespace fs = std::filesystem;

namespace {

struct RunConfig {
  std::string scenario_path;
  std::string output_dir;
  std::optional<double> dt_override_s;
  std::uint64_t seed = 0;
  std::vector<std::string> emit{"trace", "log", "report"};

  bool wants(const std::string& tag) const {
    return std::find(emit.begin(), emit.end(), tag) != emit.end();
  }
};

class OutputError : public Error {
 public:
  using Error::Error;
};

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw OutputError("cannot write " + path.string());
  f << content;
  if (!f) throw OutputError("failed writing " + path.string());
}

template <class Fn>
std::string render(Fn&& fn) {
  std::ostringstream s;
  fn(s);
  return s.str();
}

int run_dewalop(const RunConfig& cfg, sequence::Scenario s, std::ostream& out, std::ostream& err) {
  if (cfg.dt_override_s) s.dt_s = *cfg.dt_override_s;
  if (auto diags = sequence::validate(s); !diags.empty()) {
    for (const auto& d : diags) err << "error: " << d << '\n';
    return kUsageError;
  }
  const sequence::ScenarioResult r = sequence::run_scenario(s);
  const fs::path dir = cfg.output_dir;
  if (cfg.wants("trace")) write_file(dir / "trace.csv", render([&](std::ostream& o) { latch::write_trace_csv(o, r.trace); }));
  if (cfg.wants("log")) write_file(dir / "log.csv", render([&](std::ostream& o) { sequence::write_log_csv(o, r.log); }));
  if (cfg.wants("report")) {
    write_file(dir / "report.txt", render([&](std::ostream& o) {
                 sequence::write_report(o, s, r);
                 o << "seed: " << cfg.seed << '\n';
               }));
    write_file(dir / "legs.csv", render([&](std::ostream& o) { dewalop::write_leg_csv(o, r.final); }));
  }
  out << s.name << ": " << r.verdict.describe() << '\n';
  return r.verdict.success ? kSuccess : kModelFailure;
}

int run_exo(const RunConfig& cfg, config::ExoScenario e, std::ostream& out, std::ostream& err) {
  if (cfg.dt_override_s) e.joint.latch_dt_s = *cfg.dt_override_s;
  exo::EnergyComparison c;
  try {
    c = exo::energy_comparison(e.joint, e.timeline, e.lock_at_s);
  } catch (const Error& ex) {
    err << "error: " << ex.what() << '\n';
    out << e.name << ": failed: " << ex.what() << '\n';
    return kModelFailure;
  }
  const fs::path dir = cfg.output_dir;
  if (cfg.wants("trace")) {
    latch::LatchFsm housed(e.joint.lock.config());
    const auto sim = latch::actuate(housed, latch::DriveCommand::clockwise(e.joint.latch_voltage_V), e.joint.latch_dt_s);
    write_file(dir / "trace.csv", render([&](std::ostream& o) { latch::write_trace_csv(o, sim.trace); }));
  }
  if (cfg.wants("log")) write_file(dir / "comparison.csv", render([&](std::ostream& o) { exo::write_comparison_csv(o, c); }));
  if (cfg.wants("report")) {
    write_file(dir / "report.txt", render([&](std::ostream& o) {
                 o << "scenario: " << e.name << '\n';
                 exo::write_comparison_report(o, e.joint, e.timeline, c);
                 o << "seed: " << cfg.seed << '\n';
               }));
  }
  out << e.name << ": savings " << format_g(c.savings_J) << " J\n";
  return kSuccess;
}

std::string latch_hash(const latch::LatchFsm& f) {
  std::uint64_t h = 14695981039346656037ULL;
  const std::string text = std::string(latch::to_string(f.state())) + ' ' + format_g(f.screw_tip_position_m(), 17) + ' ' +
                           format_g(f.clamp_torque_Nm(), 17) + ' ' + format_g(f.current_A(), 17);
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

int run_fuzz(const RunConfig& cfg, config::FuzzScenario f, std::ostream& out, std::ostream&) {
  if (cfg.dt_override_s) f.dt_s = *cfg.dt_override_s;
  const latch::LatchFsm fsm(f.latch);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<int> dir(0, 2);
  std::uniform_real_distribution<double> volt(fsm.config().motor.min_voltage_V(), fsm.config().motor.max_voltage_V());
  std::uniform_real_distribution<double> dur(f.dt_s, f.max_command_s);
  std::vector<latch::ScheduleEntry> schedule;
  for (int i = 0; i < f.commands; ++i) {
    const int d = dir(rng);
    const double v = volt(rng);
    const double t = dur(rng);
    const latch::DriveCommand cmd = d == 0   ? latch::DriveCommand::off()
                                    : d == 1 ? latch::DriveCommand::clockwise(v)
                                             : latch::DriveCommand::counterclockwise(v);
    schedule.push_back({cmd, t});
  }
  const auto sim = latch::simulate(fsm, schedule, f.dt_s);
  const auto bad = latch::audit_transitions(sim.trace, fsm.state());

  const fs::path dir_path = cfg.output_dir;
  if (cfg.wants("trace")) write_file(dir_path / "trace.csv", render([&](std::ostream& o) { latch::write_trace_csv(o, sim.trace); }));
  if (cfg.wants("log")) {
    sequence::EventLog log;
    for (const auto& ev : sim.events) {
      log.append(ev.t_s, "latch",
                 std::string(latch::to_string(ev.event.from)) + "->" + std::string(latch::to_string(ev.event.to)) +
                     " " + ev.event.what,
                 latch_hash(ev.fsm));
    }
    write_file(dir_path / "log.csv", render([&](std::ostream& o) { sequence::write_log_csv(o, log); }));
  }
  if (cfg.wants("report")) {
    write_file(dir_path / "report.txt", render([&](std::ostream& o) {
                 o << "scenario: " << f.name << "\nseed: " << cfg.seed << "\ncommands: " << f.commands
                   << "\nsamples: " << sim.trace.samples.size() << "\nevents: " << sim.events.size()
                   << "\nillegal transitions: " << bad.size() << '\n';
                 for (const auto& b : bad) {
                   o << "  sample " << b.sample_index << ": " << latch::to_string(b.from) << " -> "
                     << latch::to_string(b.to) << '\n';
                 }
                 o << "final state: " << latch::to_string(sim.final.state()) << '\n';
               }));
  }
  out << f.name << ": " << bad.size() << " illegal transitions over " << sim.trace.samples.size() << " samples\n";
  return bad.empty() ? kSuccess : kModelFailure;
}

int cmd_run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  for (const auto& tag : cfg.emit) {
    if (tag != "trace" && tag != "log" && tag != "report") {
      err << "error: unknown --emit tag '" << tag << "' (expected trace, log, report)\n";
      return kUsageError;
    }
  }
  if (cfg.dt_override_s && !(*cfg.dt_override_s > 0.0)) {
    err << "error: --dt must be positive\n";
    return kUsageError;
  }
  config::ScenarioDocument doc;
  try {
    doc = config::load_scenario(cfg.scenario_path);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec || !fs::is_directory(cfg.output_dir)) {
    err << "error: output directory " << cfg.output_dir << " is not writable\n";
    return kUsageError;
  }
  try {
    switch (doc.kind) {
      case config::ScenarioKind::Dewalop: return run_dewalop(cfg, std::move(doc.dewalop), out, err);
      case config::ScenarioKind::Exo: return run_exo(cfg, std::move(doc.exo), out, err);
      case config::ScenarioKind::LatchFuzz: return run_fuzz(cfg, std::move(doc.fuzz), out, err);
    }
  } catch (const OutputError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kModelFailure;
  }
  return kUsageError;
}

int cmd_check(const std::string& path, std::ostream& out, std::ostream& err) {
  config::ScenarioDocument doc;
  try {
    doc = config::load_scenario(path);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
  std::vector<std::string> diags;
  if (doc.kind == config::ScenarioKind::Dewalop) diags = sequence::validate(doc.dewalop);
  for (const auto& d : diags) out << d << '\n';
  if (diags.empty()) out << "ok\n";
  return diags.empty() ? kSuccess : kModelFailure;
}

struct SfOptions {
  std::vector<double> loads_N;
  std::vector<double> plate_mm{116.0, 40.0, 9.0};
  double yield_Pa = 250e6;
  std::optional<double> lever_m;
};

int cmd_sf(const SfOptions& o, std::ostream& out, std::ostream& err) {
  if (o.loads_N.empty()) {
    err << "error: at least one --load is required\n";
    return kUsageError;
  }
  if (o.plate_mm.size() != 3) {
    err << "error: --plate expects l,h,w in mm\n";
    return kUsageError;
  }
  for (double load : o.loads_N) {
    if (!(load > 0.0)) {
      err << "error: loads must be positive, got " << format_g(load) << '\n';
      return kUsageError;
    }
  }
  PlateSpec plate{o.plate_mm[0] / 1000.0, o.plate_mm[1] / 1000.0, o.plate_mm[2] / 1000.0, BendingAxis::AboutThickness};
  MaterialSpec material;
  material.yield_strength_Pa = o.yield_Pa;
  const double lever = o.lever_m.value_or(plate.length_m);
  try {
    plate.validate();
    material.validate();
    std::ostringstream table;
    table << "# plate " << format_g(o.plate_mm[0]) << " x " << format_g(o.plate_mm[1]) << " x "
          << format_g(o.plate_mm[2]) << " mm, yield " << format_g(o.yield_Pa) << " Pa, lever " << format_g(lever)
          << " m\n";
    table << "load_N,stress_Pa,safety_factor\n";
    for (double load : o.loads_N) {
      const SafetyResult r = plate_bending_safety_factor(plate, material, load, lever);
      table << format_g(load, 12) << ',' << format_g(r.bending_stress_Pa, 12) << ',' << format_g(r.safety_factor, 12)
            << '\n';
    }
    out << table.str();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
  return kSuccess;
}

}  // namespace

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"LaMMos latch, DeWaLoP reconfiguration and exoskeleton lock simulator", "lammos"};
  app.require_subcommand(1);

  RunConfig run_cfg;
  std::string emit_list = "trace,log,report";
  double dt = 0.0;
  auto* run = app.add_subcommand("run", "Run a scenario file and write trace/log/report");
  run->add_option("--config", run_cfg.scenario_path, "Scenario file (JSON)")->required();
  run->add_option("--out", run_cfg.output_dir, "Output directory")->required();
  auto* dt_opt = run->add_option("--dt", dt, "Override the scenario timestep [s]");
  run->add_option("--seed", run_cfg.seed, "Seed for randomised scenarios");
  run->add_option("--emit", emit_list, "Comma-separated artifacts: trace,log,report");

  std::string check_path;
  auto* check = app.add_subcommand("check", "Validate a scenario file without running it");
  check->add_option("path", check_path, "Scenario file")->required();

  SfOptions sf_opts;
  std::string plate_arg;
  auto* sf = app.add_subcommand("sf", "Flat-bracket plate bending safety factors");
  sf->add_option("--load", sf_opts.loads_N, "Tip load(s) [N]")->required();
  sf->add_option("--plate", plate_arg, "Plate l,h,w [mm] (default 116,40,9)");
  sf->add_option("--yield", sf_opts.yield_Pa, "Yield strength [Pa] (default 250e6)");
  auto* lever_opt = sf->add_option("--lever", dt, "Lever arm [m] (default: plate length)");

  app.add_subcommand("defaults", "Print every model default as JSON");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }

  if (run->parsed()) {
    if (dt_opt->count() > 0) run_cfg.dt_override_s = dt;
    run_cfg.emit.clear();
    std::stringstream ss(emit_list);
    for (std::string tag; std::getline(ss, tag, ',');) {
      if (!tag.empty()) run_cfg.emit.push_back(tag);
    }
    return cmd_run(run_cfg, out, err);
  }
  if (check->parsed()) return cmd_check(check_path, out, err);
  if (sf->parsed()) {
    if (lever_opt->count() > 0) sf_opts.lever_m = dt;
    if (!plate_arg.empty()) {
      sf_opts.plate_mm.clear();
      std::stringstream ss(plate_arg);
      try {
        for (std::string v; std::getline(ss, v, ',');) sf_opts.plate_mm.push_back(std::stod(v));
      } catch (const std::exception&) {
        err << "error: --plate expects l,h,w in mm\n";
        return kUsageError;
      }
    }
    return cmd_sf(sf_opts, out, err);
  }
  out << config::defaults_json().dump(2) << '\n';
  return kSuccess;
}

}  // namespace lammos::cli
