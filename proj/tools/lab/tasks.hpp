#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"

namespace lab {

/// One sector of one (N, J) combination.
struct Unit {
  std::size_t index = 0;
  int N = 0;
  double J = 0.0;
  std::size_t sector_index = 0;
  std::uint64_t seed = 0;
  std::string sector;  // serialized charge sector
};

std::vector<Unit> plan_units(const ExperimentConfig& config);

/// Per-sector computation; the payload is plain JSON (NaN stored as null).
nlohmann::json run_unit(const ExperimentConfig& config, const Unit& unit);

struct Artifacts {
  std::map<std::string, std::string> files;  // file name -> content
  nlohmann::json summary = nlohmann::json::object();
  std::vector<std::string> errors;  // non-fatal aggregate failures
};

/// Aggregates payloads (nullopt for failed units) into the task's outputs.
Artifacts finalize(const ExperimentConfig& config, const std::vector<Unit>& units,
                   const std::vector<std::optional<nlohmann::json>>& payloads);

}  // namespace lab
