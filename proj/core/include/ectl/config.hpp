#pragma once

#include <string>

#include "ectl/simloop.hpp"

namespace ectl {

// A scenario plus output destinations, as loaded from a JSON config. Empty
// paths mean stdout.
struct RunConfig {
    Scenario scenario;
    std::string trajectory_path;
    std::string metrics_path;
};

// Strict parse: unknown keys anywhere are rejected, every value is
// type-checked, and mode-specific blocks must match the declared mode.
// Throws ConfigError naming the offending key.
RunConfig parse_config(const std::string& text);

// parse_config on the file's contents; ConfigError when unreadable.
RunConfig load_config(const std::string& path);

}  // namespace ectl
