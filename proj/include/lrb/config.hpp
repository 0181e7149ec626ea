#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "lrb/harness.hpp"

namespace lrb {

// Reads and parses a JSON config file. All schema problems surface as
// ConfigError with a message naming the offending key.
nlohmann::json load_config_file(const std::string& path);

// base_dir resolves relative kernel CSV paths (usually the config's folder).
ExperimentConfig parse_experiment_config(const nlohmann::json& j,
                                         const std::string& base_dir);

// Expands the optional "sweep" section into a grid of configs, one per
// (strategy, d) pair, each evaluated at the listed horizons.
std::vector<ExperimentConfig> expand_sweep(const nlohmann::json& j,
                                           const std::string& base_dir);

} // namespace lrb
