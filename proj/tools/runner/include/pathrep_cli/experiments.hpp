#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pathrep_cli/config.hpp"
#include "pathrep_cli/report.hpp"

namespace pathrep::cli {

/// Runs the configured experiment and applies `cfg.tolerances` to its checks.
/// Relative input files (oracle tables) resolve against `base_dir`.
/// Throws ConfigError for bad configs or unknown tolerance names; numerical
/// failures propagate as pathrep::Error.
Report run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& base_dir = {});

/// Writes tables, attachments, the echoed config and the report text into
/// `dir`, named after `stem`. Fills `report.files`; returns the paths written.
std::vector<std::filesystem::path> write_outputs(Report& report, const std::filesystem::path& dir,
                                                 const std::string& stem);

}  // namespace pathrep::cli
