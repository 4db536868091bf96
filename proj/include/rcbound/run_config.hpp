// run_config.hpp: JSON run configuration for the command-line driver

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rcbound/exact.hpp"
#include "rcbound/lifetime.hpp"
#include "rcbound/spectral.hpp"

namespace rcbound {

enum class Task { map, eigs, sweep, exact, critical, lifetime };

std::string to_string(Task t);
Task parse_task(const std::string& name);

enum class GeneratorKind { secular, partial_secular };

struct SpectralConfig {
    std::string kind{"rubin"};
    double gamma{1.0};            ///< coupling amplitude; multiplies the table for kind tabulated
    double cutoff{1.0};
    std::vector<double> offsets;  ///< shifted_sum only
    std::filesystem::path table;  ///< tabulated only; relative paths resolve against the config file
};

struct LifetimeConfig {
    std::vector<double> gammas;          ///< defaults to the spectral coupling
    std::vector<double> anharmonicities{1e-3};
    double t_final{1000.0};
    double dt{0.0};                      ///< 0 picks 0.09/‖L‖
    int n_max{6};
    int records{1000};
    std::vector<int> initial;            ///< per-mode occupations; default one bound-state quantum
    GeneratorKind generator{GeneratorKind::secular};
    RedfieldPairing pairing{RedfieldPairing::co_rotating};
    MixingForm mixing{MixingForm::exact};
    double lamb_shift{0.0};
    bool principal_parts{false};
};

struct RunConfig {
    SpectralConfig spectral;
    SystemParams system;
    Task task{Task::map};
    std::vector<int> rc_counts{1};       ///< RCs per band; a single entry applies to every band
    std::vector<double> sweep_gammas;
    int residual_samples{64};
    double exact_time{0.0};              ///< 0 skips the time-dependent moments
    InitialMoments initial_moments;
    LifetimeConfig lifetime;
    std::string output{"rcbound"};
    unsigned long long seed{0};
    std::string digest;                  ///< SHA-256 of the config file bytes, lowercase hex

    SpectralFunction spectral_function() const;
};

/// Parses and validates a config document. `source_dir` anchors relative table paths.
/// Errors are ConfigError with a JSON-pointer location or a line/column for syntax errors.
RunConfig parse_run_config(const std::string& text, const std::filesystem::path& source_dir = {});

RunConfig load_run_config(const std::filesystem::path& path);

std::string sha256_hex(const std::string& bytes);

} // namespace rcbound
