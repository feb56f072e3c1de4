#include "qcc/runconfig.hpp"

#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace qcc {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& why) {
    throw config_error("config field '" + field + "': " + why);
}

double positive_number(const json& j, const std::string& field) {
    if (!j.is_number()) fail(field, "must be a number");
    const double v = j.get<double>();
    if (!(v > 0.0)) fail(field, "must be strictly positive");
    return v;
}

void check_keys(const json& obj, const std::set<std::string>& known, const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!known.contains(key)) fail(where.empty() ? key : where + "." + key, "unknown field");
    }
}

} // namespace

RunConfig parse_run_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw config_error(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw config_error("config root must be a JSON object");
    check_keys(j, {"masses", "alpha", "beta", "mode", "couplings", "grid", "tolerances"}, "");

    RunConfig cfg;

    if (!j.contains("masses")) fail("masses", "required");
    if (!j["masses"].is_array() || j["masses"].size() != 3)
        fail("masses", "must be an array of three positive reals");
    cfg.masses.m1 = positive_number(j["masses"][0], "masses[0]");
    cfg.masses.m2 = positive_number(j["masses"][1], "masses[1]");
    cfg.masses.m3 = positive_number(j["masses"][2], "masses[2]");

    if (!j.contains("alpha")) fail("alpha", "required");
    if (!j.contains("beta")) fail("beta", "required");
    cfg.exps.attractive = positive_number(j["alpha"], "alpha");
    cfg.exps.repulsive = positive_number(j["beta"], "beta");
    if (cfg.exps.attractive == cfg.exps.repulsive) fail("beta", "must differ from alpha");

    if (!j.contains("mode")) fail("mode", "required");
    if (!j["mode"].is_string()) fail("mode", "must be a string");
    const std::string mode = j["mode"].get<std::string>();
    if (mode == "attractive-repulsive") {
        cfg.mode = InteractionMode::AttractiveRepulsive;
    } else if (mode == "attractive-attractive") {
        cfg.mode = InteractionMode::AttractiveAttractive;
    } else {
        fail("mode", "must be 'attractive-repulsive' or 'attractive-attractive'");
    }
    if (cfg.mode == InteractionMode::AttractiveRepulsive &&
        cfg.exps.repulsive < cfg.exps.attractive)
        fail("beta", "must exceed alpha in attractive-repulsive mode");
    if (cfg.exps.attractive < 1.0)
        std::cerr << "warning: alpha < 1 is outside the covered exponent range\n";

    if (!j.contains("couplings")) fail("couplings", "required");
    const json& cp = j["couplings"];
    if (!cp.is_object()) fail("couplings", "must be an object");
    if (cp.contains("A") && cp["A"].is_array()) {
        check_keys(cp, {"A", "B"}, "couplings");
        if (cp["A"].size() != 3) fail("couplings.A", "must have three entries");
        if (!cp.contains("B") || !cp["B"].is_array() || cp["B"].size() != 3)
            fail("couplings.B", "must be an array of three entries");
        for (int i = 0; i < 3; ++i) {
            cfg.couplings.A[i] = positive_number(cp["A"][i], std::string("couplings.A[") +
                                                                 std::to_string(i) + "]");
            if (!cp["B"][i].is_number() || cp["B"][i].get<double>() < 0.0)
                fail(std::string("couplings.B[") + std::to_string(i) + "]",
                     "must be a nonnegative number");
            cfg.couplings.B[i] = cp["B"][i].get<double>();
        }
    } else {
        // Proportional shorthand: pair 12 gets (A, B); k and k1 scale pairs
        // 13 and 23.
        check_keys(cp, {"A", "B", "k", "k1"}, "couplings");
        if (!cp.contains("A")) fail("couplings.A", "required");
        if (!cp.contains("B")) fail("couplings.B", "required");
        const double A = positive_number(cp["A"], "couplings.A");
        if (!cp["B"].is_number() || cp["B"].get<double>() < 0.0)
            fail("couplings.B", "must be a nonnegative number");
        const double B = cp["B"].get<double>();
        const double k = cp.contains("k") ? positive_number(cp["k"], "couplings.k") : 1.0;
        const double k1 = cp.contains("k1") ? positive_number(cp["k1"], "couplings.k1") : 1.0;
        cfg.couplings.A = {A, k * A, k1 * A};
        cfg.couplings.B = {B, k * B, k1 * B};
    }

    if (j.contains("grid")) {
        if (!j["grid"].is_number_integer()) fail("grid", "must be an integer");
        cfg.grid = j["grid"].get<int>();
        if (cfg.grid < 100) fail("grid", "must be at least 100");
    }

    if (j.contains("tolerances")) {
        const json& t = j["tolerances"];
        if (!t.is_object()) fail("tolerances", "must be an object");
        check_keys(t,
                   {"classify_rel", "verify_residual", "verify_periodicity", "integrate_rel",
                    "integrate_abs"},
                   "tolerances");
        const auto get = [&](const char* name, double& slot) {
            if (t.contains(name)) slot = positive_number(t[name], std::string("tolerances.") + name);
        };
        get("classify_rel", cfg.tol.classify_rel);
        get("verify_residual", cfg.tol.verify_residual);
        get("verify_periodicity", cfg.tol.verify_periodicity);
        get("integrate_rel", cfg.tol.integrate_rel);
        get("integrate_abs", cfg.tol.integrate_abs);
    }

    // Surface shape-level validation (nonpositive couplings and exponent
    // ordering) as config errors naming the stage.
    try {
        (void)cfg.shape_set();
    } catch (const std::invalid_argument& e) {
        throw config_error(e.what());
    }
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str());
}

} // namespace qcc
