// runner.hpp: task orchestration and deterministic CSV/JSON output for the driver

#pragma once

#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include "rcbound/parallel.hpp"
#include "rcbound/run_config.hpp"

namespace rcbound {

struct RunOutput {
    std::vector<std::filesystem::path> files;
    std::vector<std::string> summary; ///< human-readable lines for the terminal
};

/// Runs cfg.task and writes files named `<cfg.output>_<kind>.{csv,json}`.
/// Every CSV starts with `# config_sha256=<digest> task=<task>` followed by a header row.
RunOutput run(const RunConfig& cfg, Exec exec = Exec::parallel);

inline constexpr int kExitConfig = 2;
inline constexpr int kExitAccuracy = 3;

struct ExitStatus {
    int code{1};
    std::string message;
};

/// Maps a failure to the driver's exit code: 2 for invalid input, 3 for numerical accuracy, 1 otherwise.
ExitStatus classify_error(const std::exception& e);

/// %.17g, with nan and inf spelled lowercase.
std::string format_double(double x);

} // namespace rcbound
