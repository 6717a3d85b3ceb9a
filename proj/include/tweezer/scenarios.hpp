#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tweezer/config.hpp"

namespace tweezer {

std::string_view version();

// Hash of the parameters that determine a scenario's output (output directory
// and thread count excluded).
std::string parameter_hash(const ScenarioConfig& config);

struct CheckResult {
    std::string name;
    double value = 0.0;
    double limit = 0.0;
    bool passed = false;
};

struct ScenarioOutcome {
    std::vector<std::string> files;                     // written artifacts, in order
    std::vector<std::pair<std::string, double>> summary;  // headline numbers
    std::vector<CheckResult> checks;                    // filled under verify

    bool checks_passed() const noexcept;
    double value(std::string_view key) const;  // summary lookup, NumericError when absent
};

struct RunOptions {
    bool verify = false;  // hygiene and doubled-resolution re-checks
};

// Runs the configured scenario and writes its artifacts below config.output.
// Every run also writes resolved_config.txt. Library errors propagate.
ScenarioOutcome run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

}  // namespace tweezer
