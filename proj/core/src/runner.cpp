#include "ectl/runner.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <utility>

#include "json.hpp"

#include "ectl/config.hpp"
#include "ectl/errors.hpp"
#include "ectl/nodes.hpp"
#include "ectl/paillier.hpp"
#include "ectl/simloop.hpp"
#include "ectl/transport.hpp"

namespace ectl {

namespace {

template <class F>
int protect(F&& body) {
    try {
        body();
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.name() << ": " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.name() << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: unexpected: " << e.what() << "\n";
        return 1;
    }
}

std::pair<std::string, std::uint16_t> parse_addr(const std::string& addr) {
    const auto pos = addr.rfind(':');
    if (pos == std::string::npos || pos == 0 || pos + 1 >= addr.size())
        throw ConfigError("address must be host:port, got '" + addr + "'");
    int port = -1;
    try {
        port = std::stoi(addr.substr(pos + 1));
    } catch (const std::exception&) {
        throw ConfigError("address has a non-numeric port: '" + addr + "'");
    }
    if (port < 0 || port > 65535)
        throw ConfigError("address port out of range: '" + addr + "'");
    return {addr.substr(0, pos), static_cast<std::uint16_t>(port)};
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << text;
    if (!out) throw ConfigError("write failed for '" + path + "'");
}

std::string metrics_json(const RunMetrics& m) {
    nlohmann::ordered_json j;
    j["schema"] = "ectl-metrics v1";
    j["t0"] = m.t0;
    j["update_times"] = m.update_times;
    j["trigger_count"] = m.trigger_count;
    j["final_norm"] = m.final_norm;
    j["key_bits"] = m.key_bits;
    j["crypto_ms_mean"] = m.crypto_ms_mean;
    j["steps"] = m.steps;
    return j.dump(2) + "\n";
}

void write_outputs(const RunConfig& rc, const TrajectoryRecord& rec) {
    write_text(rc.trajectory_path, trajectory_csv(rec));
    // With neither destination set, stdout carries the CSV alone so it stays
    // machine-readable; the metrics need an explicit path in that case.
    if (rc.metrics_path.empty() && rc.trajectory_path.empty()) return;
    write_text(rc.metrics_path, metrics_json(rec.metrics));
    log_info("final_norm " + std::to_string(rec.metrics.final_norm) + " after " +
             std::to_string(rec.metrics.steps) + " steps");
}

}  // namespace

LogLevel log_level() {
    static const LogLevel lvl = [] {
        const char* v = std::getenv("ECTL_LOG");
        if (!v) return LogLevel::Error;
        const std::string s(v);
        if (s == "debug") return LogLevel::Debug;
        if (s == "info") return LogLevel::Info;
        return LogLevel::Error;
    }();
    return lvl;
}

void log_info(const std::string& msg) {
    if (static_cast<int>(log_level()) >= static_cast<int>(LogLevel::Info))
        std::cerr << "[info] " << msg << "\n";
}

void log_debug(const std::string& msg) {
    if (static_cast<int>(log_level()) >= static_cast<int>(LogLevel::Debug))
        std::cerr << "[debug] " << msg << "\n";
}

int run_command(const std::string& config_path, const std::string& out_override) {
    return protect([&] {
        RunConfig rc = load_config(config_path);
        if (!out_override.empty()) rc.trajectory_path = out_override;
        log_info("run: config '" + config_path + "'");
        const TrajectoryRecord rec = run_scenario(rc.scenario);
        write_outputs(rc, rec);
    });
}

int plant_command(const std::string& config_path, const std::string& connect_addr,
                  const std::string& out_override) {
    return protect([&] {
        RunConfig rc = load_config(config_path);
        if (!out_override.empty()) rc.trajectory_path = out_override;
        const auto [host, port] = parse_addr(connect_addr);
        log_info("plant: connecting to " + host + ":" + std::to_string(port));
        const auto channel = tcp_connect(host, port, 10000);
        const TrajectoryRecord rec = run_plant_on_channel(rc.scenario, *channel);
        write_outputs(rc, rec);
    });
}

int controller_command(const std::string& listen_addr, int accept_timeout_ms) {
    return protect([&] {
        const auto [host, port] = parse_addr(listen_addr);
        TcpListener listener(host, port);
        log_info("controller: listening on " + host + ":" + std::to_string(listener.port()));
        const auto channel = listener.accept(accept_timeout_ms);
        if (!channel) {
            std::cout << "controller: no connection\n";
            return;
        }
        const std::size_t handled = controller_serve(*channel);
        std::cout << "controller: handled " << handled << " frames\n";
    });
}

int keygen_command(std::size_t bits, std::uint64_t seed, const std::string& out_path,
                   const std::string& config_path) {
    return protect([&] {
        if (bits < 64)
            throw ConfigError("keygen: bits must be >= 64 (smaller keys are test-only)");
        const KeyPair kp = keygen(bits, seed);
        write_text(out_path, serialize_keypair(kp));
        if (config_path.empty()) return;

        const RunConfig rc = load_config(config_path);
        validate_scenario(rc.scenario);
        const Bigint n_min = rc.scenario.mode == RunMode::Nonlinear
                                 ? nonlinear_design_for(rc.scenario).n_min
                                 : linear_design_for(rc.scenario).n_min;
        const bool ok = kp.pub.n >= n_min;
        std::cout << "modulus " << (ok ? "clears" : "is BELOW")
                  << " the scenario bound: N has " << bit_length(kp.pub.n)
                  << " bits, the bound needs " << bit_length(n_min) << "\n";
    });
}

}  // namespace ectl
