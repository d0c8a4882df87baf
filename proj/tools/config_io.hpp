#pragma once

// YAML experiment configuration and report serialization for the driver.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wavekernel/suites.hpp"

namespace wavekernel::cli {

struct Experiment {
  suites::Config config;
  std::vector<std::string> suites;  // selection for the `all` subcommand
  std::optional<std::string> output;
};

/// Parses and validates a YAML document. Errors are ConfigError whose field
/// carries the key path and, when known, " (line N)".
Experiment parse_experiment(const std::string& yaml_text);
Experiment load_experiment(const std::filesystem::path& path);

nlohmann::json to_json(const suites::Config& cfg);
nlohmann::json to_json(const suites::SuiteResult& result, const suites::Config& cfg);

/// Writes report.json, tables.txt and one CSV per table into dir.
void write_artifacts(const std::filesystem::path& dir, const suites::SuiteResult& result, const suites::Config& cfg);

/// Aligned text: one line per check, then every table.
std::string render_text(const suites::SuiteResult& result);

}  // namespace wavekernel::cli
