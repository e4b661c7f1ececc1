#pragma once

#include <string>

#include <json.hpp>

#include "qrsim/engine.hpp"

namespace qrsim {

/// Parses a scenario document. The schema is strict: unknown keys are
/// rejected so typos cannot silently change a run. Rates are pairs per
/// second, times are seconds.
ScenarioConfig parse_scenario(const nlohmann::json& doc);

/// Reads and parses a scenario file. Throws IoError when the file cannot
/// be read and ValidationError for schema problems.
ScenarioConfig load_scenario_file(const std::string& path);

/// Canonical document for a configuration; parse_scenario(dump_scenario(c))
/// reproduces c.
nlohmann::json dump_scenario(const ScenarioConfig& config);

/// Stable fingerprint of the canonical document, used to key merged
/// multi-seed results.
std::string scenario_fingerprint(const ScenarioConfig& config);

} // namespace qrsim
