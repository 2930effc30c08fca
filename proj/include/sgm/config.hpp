#pragma once

#include <string>

#include "sgm/bench.hpp"
#include "sgm/simgen.hpp"

namespace sgm {

// Strict JSON -> config parsing: every key must be recognized (typos rejected by
// name), enums are lowercase strings, all fields optional with the C++ defaults.
ScenarioSpec parse_scenario(const std::string& json_text);
ExperimentConfig parse_experiment(const std::string& json_text);

ScenarioSpec load_scenario(const std::string& path);
ExperimentConfig load_experiment(const std::string& path);

// Canonical re-serialization (sorted keys); config_hash is a 64-bit FNV-1a digest
// of this text, so sidecar hashes identify configs independent of formatting.
std::string scenario_to_json(const ScenarioSpec& spec);
std::string experiment_to_json(const ExperimentConfig& cfg);
std::uint64_t config_hash(const std::string& canonical_json);

}  // namespace sgm
