#pragma once

#include <cstdint>
#include <string>

namespace ectl {

// Command bodies behind the CLI subcommands. Each one catches library
// errors, prints "error: <name>: <detail>" to stderr, and returns the
// process exit code: 0 success, 2 for configuration errors, 1 for
// everything else.

// Loads the config, runs the scenario, writes the trajectory CSV and the
// metrics JSON. out_override, when nonempty, replaces the configured
// trajectory path. Empty destinations go to stdout.
int run_command(const std::string& config_path, const std::string& out_override);

// Plant node over TCP: connects to a listening controller and runs the
// identical loop, writing the same outputs as run_command.
int plant_command(const std::string& config_path, const std::string& connect_addr,
                  const std::string& out_override);

// Controller node: accepts one plant connection and serves it until
// Shutdown. Never sees plaintext, so it reports frame counts only. Exits
// cleanly when nothing connects within the timeout.
int controller_command(const std::string& listen_addr, int accept_timeout_ms);

// Generates and writes a serialized key pair. bits must be >= 64 here
// (smaller keys exist for tests only). With a config, also reports whether
// the modulus clears that scenario's bound.
int keygen_command(std::size_t bits, std::uint64_t seed, const std::string& out_path,
                   const std::string& config_path);

// ECTL_LOG={error,info,debug}; unset means error.
enum class LogLevel { Error = 0, Info = 1, Debug = 2 };
LogLevel log_level();
void log_info(const std::string& msg);
void log_debug(const std::string& msg);

}  // namespace ectl
