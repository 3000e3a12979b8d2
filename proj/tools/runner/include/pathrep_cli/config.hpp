#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "pathrep/pathrep.hpp"

namespace pathrep::cli {

using nlohmann::json;

/// Parse or validation failure. `key` is the dotted path of the offending
/// entry ("connection.preset"); line/column are set for syntax errors.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, std::string key = {}, int line = 0, int column = 0);

  const std::string& key() const { return key_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  std::string key_;
  int line_;
  int column_;
};

inline constexpr const char* kExperimentKinds[] = {
    "transport", "convergence", "reconstruct", "holonomy", "bordism", "tabulate", "verify-all"};

/// One experiment. Nested blocks are kept as JSON and validated on parse by
/// building the objects they describe.
struct ExperimentConfig {
  std::string experiment;
  std::string name;
  std::uint64_t seed = 0;
  std::string output_dir;
  json connection;
  json path;
  json integrator;
  json bundle;
  json word;
  json reconstruct;
  json holonomy;
  json expect;
  std::map<std::string, double> tolerances;

  bool operator==(const ExperimentConfig&) const = default;

  /// Output file stem: `name` or the experiment kind.
  std::string stem() const;
  json to_json() const;
};

/// JSON with // and /* */ comments. A non-empty `experiment` fills in a
/// missing "experiment" key and must agree with a present one.
ExperimentConfig parse_config(std::string_view text, const std::string& experiment = {});
ExperimentConfig parse_config_file(const std::string& path, const std::string& experiment = {});
ExperimentConfig config_from_json(const json& j);
/// Re-validates the blocks the experiment kind needs.
void validate(const ExperimentConfig& cfg);

// Builders; `key` is the dotted location used in diagnostics.
Matrix parse_matrix(const json& j, const std::string& key);
Vector parse_vector(const json& j, const std::string& key);
ConnectionForm build_connection(const json& j, const std::string& key = "connection");
Path build_path(const json& j, const std::string& key = "path");
IntegratorConfig build_integrator(const json& j, const std::string& key = "integrator");
GlobalBundle build_bundle(const json& j, const std::string& key = "bundle");
BordismWord build_word(const json& j, const GlobalBundle& b, const std::string& key = "word");

/// "name=value" -> (name, value); throws ConfigError.
std::pair<std::string, double> parse_tolerance(const std::string& text);

}  // namespace pathrep::cli
