#include "ectl/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include "json.hpp"

#include "ectl/errors.hpp"

namespace ectl {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ConfigError("config: " + where + ": " + what);
}

std::string join(const std::string& scope, const std::string& key) {
    return scope.empty() ? key : scope + "." + key;
}

void reject_unknown(const json& obj, const std::string& scope,
                    std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known) fail(join(scope, it.key()), "unknown key");
    }
}

const json* find(const json& obj, const char* key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

void read_bool(const json& obj, const std::string& scope, const char* key, bool& out) {
    if (const json* v = find(obj, key)) {
        if (!v->is_boolean()) fail(join(scope, key), "expected a boolean");
        out = v->get<bool>();
    }
}

void read_double(const json& obj, const std::string& scope, const char* key, double& out) {
    if (const json* v = find(obj, key)) {
        if (!v->is_number()) fail(join(scope, key), "expected a number");
        out = v->get<double>();
    }
}

void read_string(const json& obj, const std::string& scope, const char* key, std::string& out) {
    if (const json* v = find(obj, key)) {
        if (!v->is_string()) fail(join(scope, key), "expected a string");
        out = v->get<std::string>();
    }
}

template <class T>
void read_integer(const json& obj, const std::string& scope, const char* key, T& out,
                  bool allow_negative) {
    if (const json* v = find(obj, key)) {
        if (!v->is_number_integer() && !v->is_number_unsigned())
            fail(join(scope, key), "expected an integer");
        if (!allow_negative && v->is_number_integer() && v->get<std::int64_t>() < 0)
            fail(join(scope, key), "must be >= 0");
        out = v->get<T>();
    }
}

Vec read_vector(const json& v, const std::string& where) {
    if (!v.is_array() || v.empty()) fail(where, "expected a nonempty array of numbers");
    Vec out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) fail(where, "entry " + std::to_string(i) + " is not a number");
        out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
    }
    return out;
}

Mat read_matrix(const json& obj, const std::string& scope, const char* key) {
    const json* v = find(obj, key);
    if (!v) fail(join(scope, key), "required");
    if (!v->is_array() || v->empty()) fail(join(scope, key), "expected a nonempty array of rows");
    const std::size_t rows = v->size();
    std::size_t cols = 0;
    Mat out;
    for (std::size_t i = 0; i < rows; ++i) {
        const json& row = (*v)[i];
        if (!row.is_array() || row.empty())
            fail(join(scope, key), "row " + std::to_string(i) + " is not a nonempty array");
        if (i == 0) {
            cols = row.size();
            out.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        } else if (row.size() != cols) {
            fail(join(scope, key), "rows have unequal lengths");
        }
        for (std::size_t j = 0; j < cols; ++j) {
            if (!row[j].is_number())
                fail(join(scope, key), "entry (" + std::to_string(i) + "," + std::to_string(j) +
                                           ") is not a number");
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                row[j].get<double>();
        }
    }
    return out;
}

double read_required_double(const json& obj, const std::string& scope, const char* key) {
    if (!find(obj, key)) fail(join(scope, key), "required");
    double out = 0;
    read_double(obj, scope, key, out);
    return out;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config: top level must be an object");

    reject_unknown(root, "",
                   {"mode", "transport", "seed", "horizon", "x0", "key_bits", "r_max", "q_sat",
                    "epsilon", "safety_factor", "q_weight", "convergence_floor_rel",
                    "reblind_per_step", "record_timings", "encrypted", "linear", "event",
                    "nonlinear", "outputs"});

    RunConfig rc;
    Scenario& s = rc.scenario;

    std::string mode = "linear";
    read_string(root, "", "mode", mode);
    if (mode == "linear")
        s.mode = RunMode::Linear;
    else if (mode == "event_triggered")
        s.mode = RunMode::EventTriggered;
    else if (mode == "nonlinear")
        s.mode = RunMode::Nonlinear;
    else
        fail("mode", "unknown mode '" + mode + "'");

    std::string transport = "in_process";
    read_string(root, "", "transport", transport);
    if (transport == "in_process")
        s.transport = TransportKind::InProcess;
    else if (transport == "tcp")
        s.transport = TransportKind::Tcp;
    else
        fail("transport", "unknown transport '" + transport + "'");

    read_integer(root, "", "seed", s.seed, false);
    read_integer(root, "", "horizon", s.horizon, true);
    read_integer(root, "", "key_bits", s.key_bits, false);
    read_integer(root, "", "r_max", s.r_max, false);
    read_integer(root, "", "q_sat", s.q_sat, true);
    read_double(root, "", "epsilon", s.epsilon);
    read_double(root, "", "safety_factor", s.safety_factor);
    read_double(root, "", "q_weight", s.q_weight);
    read_double(root, "", "convergence_floor_rel", s.convergence_floor_rel);
    read_bool(root, "", "reblind_per_step", s.reblind_per_step);
    read_bool(root, "", "record_timings", s.record_timings);
    read_bool(root, "", "encrypted", s.encrypted);

    const json* x0 = find(root, "x0");
    if (!x0) fail("x0", "required");
    s.x0 = read_vector(*x0, "x0");

    const bool linear_mode = s.mode != RunMode::Nonlinear;
    if (const json* lin = find(root, "linear")) {
        if (!linear_mode) fail("linear", "only valid with the linear modes");
        if (!lin->is_object()) fail("linear", "expected an object");
        reject_unknown(*lin, "linear", {"a", "b", "k"});
        s.plant.a = read_matrix(*lin, "linear", "a");
        s.plant.b = read_matrix(*lin, "linear", "b");
        s.k = read_matrix(*lin, "linear", "k");
    } else if (linear_mode) {
        fail("linear", "required for the linear modes");
    }

    if (const json* ev = find(root, "event")) {
        if (s.mode != RunMode::EventTriggered) fail("event", "only valid with event_triggered mode");
        if (!ev->is_object()) fail("event", "expected an object");
        reject_unknown(*ev, "event", {"always_trigger"});
        read_bool(*ev, "event", "always_trigger", s.always_trigger);
    }

    if (const json* nl = find(root, "nonlinear")) {
        if (s.mode != RunMode::Nonlinear) fail("nonlinear", "only valid with nonlinear mode");
        if (!nl->is_object()) fail("nonlinear", "expected an object");
        reject_unknown(*nl, "nonlinear",
                       {"a", "b", "k", "alpha", "x_min", "x_max", "target_eps", "delta0",
                        "freeze_stage", "c2_radius"});
        s.nl_a = read_required_double(*nl, "nonlinear", "a");
        s.nl_b = read_required_double(*nl, "nonlinear", "b");
        s.nl_k = read_required_double(*nl, "nonlinear", "k");
        if (!find(*nl, "alpha")) fail("nonlinear.alpha", "required");
        read_string(*nl, "nonlinear", "alpha", s.alpha_name);
        read_double(*nl, "nonlinear", "x_min", s.x_min);
        read_double(*nl, "nonlinear", "x_max", s.x_max);
        read_double(*nl, "nonlinear", "target_eps", s.target_eps);
        read_double(*nl, "nonlinear", "delta0", s.delta0);
        read_integer(*nl, "nonlinear", "freeze_stage", s.freeze_stage, true);
        read_double(*nl, "nonlinear", "c2_radius", s.c2_radius);
    } else if (s.mode == RunMode::Nonlinear) {
        fail("nonlinear", "required for nonlinear mode");
    }

    if (const json* out = find(root, "outputs")) {
        if (!out->is_object()) fail("outputs", "expected an object");
        reject_unknown(*out, "outputs", {"trajectory_csv", "metrics_json"});
        read_string(*out, "outputs", "trajectory_csv", rc.trajectory_path);
        read_string(*out, "outputs", "metrics_json", rc.metrics_path);
    }

    return rc;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_config(buf.str());
    } catch (const ConfigError& e) {
        throw ConfigError(std::string(e.what()) + " (in " + path + ")");
    }
}

}  // namespace ectl
