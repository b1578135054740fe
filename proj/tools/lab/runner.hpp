#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "config.hpp"

namespace lab {

enum ExitCode : int { kOk = 0, kConfigError = 1, kPartialFailure = 2, kHardError = 3 };

/// Computes every unit from scratch, then writes outputs and manifest.json.
int run_experiment(const ExperimentConfig& config, std::ostream& log);

/// Recomputes the units of `out_dir` without a valid partial result and
/// rebuilds the aggregates. A complete manifest is a no-op.
int resume_experiment(const std::filesystem::path& out_dir, std::optional<unsigned> workers, std::ostream& log);

/// Config recorded in a manifest; throws ConfigError when unreadable.
ExperimentConfig config_from_manifest(const std::filesystem::path& manifest);

const char* code_version();

}  // namespace lab
