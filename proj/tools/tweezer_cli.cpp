// Scenario runner: tweezer --config run.cfg [--scenario id] [--out dir] [--threads n] [--verify]

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tweezer/config.hpp"
#include "tweezer/errors.hpp"
#include "tweezer/format.hpp"
#include "tweezer/scenarios.hpp"

namespace {

enum Exit { ok = 0, config_error = 2, numeric_error = 3, verify_failed = 4 };

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tweezer transport and gate scenario runner"};
    std::string config_path;
    std::string out_dir;
    std::string scenario;
    std::size_t threads = 0;
    bool verify = false;
    bool list_keys = false;
    app.add_option("--config", config_path, "config file with section.key = value lines");
    app.add_option("--out", out_dir, "output directory (overrides run.output)");
    app.add_option("--scenario", scenario, "scenario id (overrides run.scenario)");
    app.add_option("--threads", threads, "worker threads for scans and maps");
    app.add_flag("--verify", verify, "re-check numerics: norm, energy, doubled resolution");
    app.add_flag("--list-keys", list_keys, "print the accepted config keys and exit");
    app.set_version_flag("--version", std::string(tweezer::version()));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : config_error;
    }

    if (list_keys) {
        for (const auto& key : tweezer::config_keys()) std::cout << key << '\n';
        return ok;
    }

    tweezer::ScenarioConfig config;
    try {
        config = config_path.empty() ? tweezer::ScenarioConfig::defaults() : tweezer::load_config(config_path);
        if (!scenario.empty()) config.scenario = tweezer::parse_scenario(scenario);
        if (!out_dir.empty()) config.output = out_dir;
        if (threads > 0) config.threads = threads;
    } catch (const tweezer::Error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_error;
    }

    tweezer::ScenarioOutcome outcome;
    try {
        outcome = tweezer::run_scenario(config, {verify});
    } catch (const tweezer::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const std::exception& e) {
        std::cerr << "scenario " << tweezer::to_string(config.scenario) << " failed: " << e.what() << '\n';
        return numeric_error;
    }

    std::cout << "scenario " << tweezer::to_string(config.scenario) << " (parameters "
              << tweezer::parameter_hash(config) << ")\n";
    for (const auto& [key, value] : outcome.summary)
        std::cout << "  " << key << " = " << tweezer::format_double(value) << '\n';
    for (const auto& file : outcome.files) std::cout << "wrote " << file << '\n';
    if (verify) {
        for (const auto& c : outcome.checks)
            if (!c.passed)
                std::cout << "verify FAILED: " << c.name << " = " << tweezer::format_double(c.value)
                          << " (limit " << tweezer::format_double(c.limit) << ")\n";
        std::cout << "verify: " << outcome.checks.size() << " checks, "
                  << (outcome.checks_passed() ? "all passed" : "failures") << '\n';
        if (!outcome.checks_passed()) return verify_failed;
    }
    return ok;
}
