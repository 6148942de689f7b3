#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "lammos/errors.hpp"
#include "lammos/exo.hpp"
#include "lammos/latch.hpp"
#include "lammos/sequence.hpp"

namespace lammos::config {

/// Malformed scenario text or a value of the wrong type/unit.
class ParseError : public Error {
 public:
  using Error::Error;
};

enum class ScenarioKind { Dewalop, Exo, LatchFuzz };

struct ExoScenario {
  std::string name = "exo";
  exo::ExoJoint joint;
  exo::LoadTimeline timeline;
  std::optional<double> lock_at_s;
};

/// Randomised drive schedule replayed through one latch and audited for illegal edges.
struct FuzzScenario {
  std::string name = "latch-fuzz";
  latch::LatchConfig latch = latch::LatchConfig::lammos_default();
  int commands = 200;
  double max_command_s = 2.0;
  double dt_s = 0.01;
};

struct ScenarioDocument {
  ScenarioKind kind = ScenarioKind::Dewalop;
  sequence::Scenario dewalop;
  ExoScenario exo;
  FuzzScenario fuzz;
};

/// Every key carries its unit (`stall_torque_gcm`, `inner_diameter_mm`, `dt_s`...).
/// Missing keys take the defaults reported by defaults_json(). Relative paths inside
/// the document (timeline_csv) resolve against base_dir.
ScenarioDocument parse_scenario(const std::string& text, const std::filesystem::path& base_dir = {});
ScenarioDocument load_scenario(const std::filesystem::path& path);

latch::LatchConfig parse_mechanism(const nlohmann::json& mechanism);
nlohmann::json mechanism_json(const latch::LatchConfig& config);

/// All model defaults, with the ones not taken from measured data marked.
nlohmann::json defaults_json();

}  // namespace lammos::config
