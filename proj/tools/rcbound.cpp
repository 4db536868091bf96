// rcbound.cpp: command-line driver: rcbound --config run.json [--out prefix] [--task name] [--quiet]

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rcbound/errors.hpp"
#include "rcbound/parallel.hpp"
#include "rcbound/run_config.hpp"
#include "rcbound/runner.hpp"

namespace {

int thread_count_from_env() {
    const char* env = std::getenv("RC_THREADS");
    if (!env || !*env) return 0;
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (*end != '\0' || n < 1 || n > 1024) throw rcbound::ConfigError("RC_THREADS must be an integer in [1, 1024]");
    return static_cast<int>(n);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reaction-coordinate bound-state toolkit"};
    std::string config_path, out_prefix, task;
    bool quiet = false;
    app.add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
    app.add_option("--out", out_prefix, "output path prefix (overrides the config)");
    app.add_option("--task", task, "map, eigs, sweep, exact, critical or lifetime (overrides the config)");
    app.add_flag("--quiet", quiet, "suppress the summary");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : rcbound::kExitConfig;
    }

    try {
        rcbound::set_threads(thread_count_from_env());
        rcbound::RunConfig cfg = rcbound::load_run_config(config_path);
        if (!out_prefix.empty()) cfg.output = out_prefix;
        if (!task.empty()) cfg.task = rcbound::parse_task(task);
        const auto result = rcbound::run(cfg);
        if (!quiet) {
            for (const auto& line : result.summary) std::cout << line << '\n';
            for (const auto& f : result.files) std::cout << "wrote " << f.string() << '\n';
        }
        return 0;
    } catch (const std::exception& e) {
        const auto status = rcbound::classify_error(e);
        std::cerr << status.message << '\n';
        return status.code;
    }
}
