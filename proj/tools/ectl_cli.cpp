#include <cstdint>
#include <string>

#include "CLI11.hpp"

#include "ectl/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Encrypted networked control: scenario runner and node hosts"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::string listen_addr;
    std::string connect_addr;
    std::string key_out;
    std::string key_config;
    std::uint64_t seed = 1;
    std::size_t bits = 512;
    int timeout_ms = 10000;

    CLI::App* run_cmd = app.add_subcommand("run", "Run a scenario end to end");
    run_cmd->add_option("--config", config_path, "Scenario config (JSON)")->required();
    run_cmd->add_option("--out", out_path, "Trajectory CSV path (overrides the config)");

    CLI::App* plant_cmd = app.add_subcommand("plant", "Plant node: connect to a controller");
    plant_cmd->add_option("--config", config_path, "Scenario config (JSON)")->required();
    plant_cmd->add_option("--connect", connect_addr, "Controller address host:port")->required();
    plant_cmd->add_option("--out", out_path, "Trajectory CSV path (overrides the config)");

    CLI::App* controller_cmd =
        app.add_subcommand("controller", "Controller node: serve one plant over TCP");
    controller_cmd->add_option("--listen", listen_addr, "Bind address host:port")->required();
    controller_cmd->add_option("--timeout-ms", timeout_ms,
                               "How long to wait for a plant before exiting cleanly");

    CLI::App* keygen_cmd = app.add_subcommand("keygen", "Generate a serialized key pair");
    keygen_cmd->add_option("--bits", bits, "Modulus bit length, >= 64");
    keygen_cmd->add_option("--seed", seed, "Deterministic generator seed");
    keygen_cmd->add_option("--out", key_out, "Output path (default stdout)");
    keygen_cmd->add_option("--config", key_config,
                           "Scenario config to check the modulus bound against");

    CLI11_PARSE(app, argc, argv);

    if (run_cmd->parsed()) return ectl::run_command(config_path, out_path);
    if (plant_cmd->parsed()) return ectl::plant_command(config_path, connect_addr, out_path);
    if (controller_cmd->parsed()) return ectl::controller_command(listen_addr, timeout_ms);
    if (keygen_cmd->parsed()) return ectl::keygen_command(bits, seed, key_out, key_config);
    return 1;
}
