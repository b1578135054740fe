#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace lab {

/// Invalid configuration; `where` is "file:line" or "command line".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& where, const std::string& what)
      : std::runtime_error(where.empty() ? what : where + ": " + what) {}
};

enum class ModelKind { schwinger, scaled, xxz };

struct ModelConfig {
  ModelKind kind = ModelKind::schwinger;
  std::vector<int> N{12};
  std::vector<double> J{1.0};
  double w = 1.0;
  double m = 0.0;
  double theta = 3.141592653589793;
  double J_zz = 1.0;
  double J_q = 1.0;
  // xxz
  double J_xy = 1.0;
  double J_z = 1.0;
  double W = 0.0;
  std::string disorder = "uniform";
};

using OptionValue = std::variant<bool, std::int64_t, double, std::string>;

struct ExperimentConfig {
  std::string task;
  ModelConfig model;
  int sectors = 100;
  std::uint64_t master_seed = 1;
  std::map<std::string, OptionValue> options;  // task options, defaults filled in
  std::string out = "results";
  unsigned workers = 0;  // 0: default
  bool plot = false;

  double option_double(const std::string& key) const;
  std::int64_t option_int(const std::string& key) const;
  bool option_bool(const std::string& key) const;
  std::string option_string(const std::string& key) const;
};

const std::vector<std::string>& task_names();

/// Command-line values that override config keys one-to-one.
struct Overrides {
  std::optional<std::string> task;
  std::optional<std::string> N;  // comma-separated list allowed
  std::optional<std::string> J;
  std::optional<double> w;
  std::optional<double> theta;
  std::optional<double> m;
  std::optional<int> sectors;
  std::optional<std::uint64_t> seed;
  std::optional<double> tmax;
  std::optional<bool> plot;
  std::optional<unsigned> workers;
  std::optional<std::string> out;
};

/// Parses a TOML config (empty path: defaults only), applies overrides, fills
/// task defaults and validates. Throws lab::ConfigError.
ExperimentConfig load_config(const std::string& path, const Overrides& overrides);

/// Validation against the task schema; throws lab::ConfigError.
void validate(ExperimentConfig& config, const std::string& where = "config");

/// Everything that determines the numbers (not out, workers, plot).
nlohmann::json numeric_json(const ExperimentConfig& config);
nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig from_json(const nlohmann::json& j);

/// FNV-1a 64 of the canonical numeric JSON, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);
std::uint64_t fnv1a64(const std::string& bytes);

std::string to_string(ModelKind kind);

}  // namespace lab
