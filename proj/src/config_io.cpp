#include "turnon/config_io.hpp"

#include "json_fields.hpp"
#include "turnon/device_io.hpp"
#include "turnon/errors.hpp"

#include <fstream>

namespace turnon {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// (json key, member) pairs shared by reader and writer.
template <class P, class F>
void for_each_synthetic_field(P& p, F&& f) {
    f("v_th_V", p.v_th);
    f("transconductance_A_per_V2", p.transconductance);
    f("r_drift_ohm", p.r_drift);
    f("clm_per_V", p.clm);
    f("body_knee_V", p.body_knee);
    f("body_resistance_ohm", p.body_resistance);
    f("body_softness_V", p.body_softness);
    f("c_gs_F", p.c_gs);
    f("c_gd0_F", p.c_gd0);
    f("c_gd_min_F", p.c_gd_min);
    f("c_gd_corner_V", p.c_gd_corner);
    f("c_gd_exponent", p.c_gd_exponent);
    f("c_ds0_F", p.c_ds0);
    f("c_ds_min_F", p.c_ds_min);
    f("c_ds_corner_V", p.c_ds_corner);
    f("c_ds_exponent", p.c_ds_exponent);
    f("c_par_gd_F", p.c_par_gd);
    f("c_par_ds_F", p.c_par_ds);
    f("q_rr_C", p.q_rr);
    f("v_ee_ref_V", p.v_ee_ref);
    f("v_gs_min_V", p.v_gs_min);
    f("v_gs_max_V", p.v_gs_max);
    f("v_ds_max_V", p.v_ds_max);
}

template <class S, class F>
void for_each_solver_field(S& s, F&& f) {
    f("rel_tol", s.rel_tol);
    f("abs_tol", s.abs_tol);
    f("max_step_s", s.max_step);
    f("min_step_s", s.min_step);
    f("initial_step_s", s.initial_step);
    f("newton_tol", s.newton_tol);
    f("event_tol_s", s.event_tol);
}

std::shared_ptr<const DeviceModel> device_from_spec(const json& spec, const fs::path& base_dir,
                                                    const std::string& key) {
    if (spec.is_string()) {
        return std::make_shared<const DeviceModel>(
            load_device_manifest(base_dir / spec.get<std::string>()));
    }
    if (spec.is_object()) {
        const detail::Fields f(spec, "devices." + key, {"synthetic"});
        return std::make_shared<const DeviceModel>(
            make_synthetic_device(synthetic_params_from_json(f.raw("synthetic"))));
    }
    throw ConfigError("devices." + key + ": expected a manifest path or {\"synthetic\": {...}}");
}

}  // namespace

SyntheticDeviceParams synthetic_params_from_json(const json& j) {
    std::set<std::string> allowed{"name"};
    SyntheticDeviceParams p;
    for_each_synthetic_field(p, [&](const char* k, Real&) { allowed.insert(k); });
    const detail::Fields f(j, "synthetic", allowed);
    p.name = f.text("name", p.name);
    for_each_synthetic_field(p, [&](const char* k, Real& v) { v = f.number(k, v); });
    return p;
}

json to_json(const SyntheticDeviceParams& p) {
    json j{{"name", p.name}};
    for_each_synthetic_field(p, [&](const char* k, const Real& v) { j[k] = v; });
    return j;
}

SolverSettings solver_settings_from_json(const json& j) {
    std::set<std::string> allowed{"newton_max_iters", "fixed_step", "error_per_unit_step"};
    SolverSettings s;
    for_each_solver_field(s, [&](const char* k, Real&) { allowed.insert(k); });
    const detail::Fields f(j, "solver", allowed);
    for_each_solver_field(s, [&](const char* k, Real& v) { v = f.number(k, v); });
    s.newton_max_iters = static_cast<int>(f.number("newton_max_iters", s.newton_max_iters));
    s.fixed_step = f.flag("fixed_step", s.fixed_step);
    s.error_per_unit_step = f.flag("error_per_unit_step", s.error_per_unit_step);
    try {
        s.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(std::string("solver: ") + e.what());
    }
    return s;
}

json to_json(const SolverSettings& s) {
    json j;
    for_each_solver_field(s, [&](const char* k, const Real& v) { j[k] = v; });
    j["newton_max_iters"] = s.newton_max_iters;
    j["fixed_step"] = s.fixed_step;
    j["error_per_unit_step"] = s.error_per_unit_step;
    return j;
}

RunConfig run_config_from_json(const json& j, const fs::path& base_dir) {
    const detail::Fields f(j, "",
                           {"v_dc_V", "gate_on_V", "gate_off_V", "r_g_s1_ohm", "r_g_s2_ohm", "load",
                            "scenario", "delta_v_V", "shoot_through_enabled", "devices", "solver",
                            "t_end_s"});
    RunConfig rc;
    HalfBridgeConfig& c = rc.circuit;
    c.v_dc = f.number("v_dc_V");
    c.gate_on = f.number("gate_on_V", c.gate_on);
    c.gate_off = f.number("gate_off_V", c.gate_off);
    c.r_g_s1 = f.number("r_g_s1_ohm", c.r_g_s1);
    c.r_g_s2 = f.number("r_g_s2_ohm", c.r_g_s2);
    c.scenario = scenario_from_string(f.text("scenario"));
    c.delta_v = f.number("delta_v_V", 0.0);
    c.shoot_through_enabled = f.flag("shoot_through_enabled", false);

    const detail::Fields lf(f.raw("load"), "load",
                            {"type", "current_A", "inductance_H", "initial_current_A", "direction"});
    const std::string type = lf.text("type");
    const LoadDirection dir = load_direction_from_string(lf.text("direction"));
    if (type == "constant_current") {
        if (lf.has("inductance_H") || lf.has("initial_current_A")) {
            throw ConfigError("load: constant_current takes current_A only");
        }
        c.load = ConstantCurrentLoad{lf.number("current_A"), dir};
    } else if (type == "inductor") {
        if (lf.has("current_A")) {
            throw ConfigError("load.current_A: inductor loads use initial_current_A");
        }
        c.load = InductorLoad{lf.number("inductance_H"), lf.number("initial_current_A"), dir};
    } else {
        throw ConfigError("load.type: unknown value '" + type +
                          "' (expected constant_current or inductor)");
    }

    const detail::Fields df(f.raw("devices"), "devices", {"s1", "s2"});
    rc.device_specs = json{{"s1", df.raw("s1")}, {"s2", df.raw("s2")}};
    c.dev_s1 = device_from_spec(df.raw("s1"), base_dir, "s1");
    c.dev_s2 = device_from_spec(df.raw("s2"), base_dir, "s2");

    if (f.has("solver")) {
        rc.solver = solver_settings_from_json(f.raw("solver"));
    }
    rc.t_end = f.number("t_end_s", rc.t_end);
    if (!(rc.t_end > 0)) {
        throw ConfigError("t_end_s: must be positive");
    }
    c.validate();
    return rc;
}

RunConfig load_run_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path.string() + ": cannot open config");
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    try {
        return run_config_from_json(j, path.parent_path());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

json circuit_to_json(const HalfBridgeConfig& c) {
    json load;
    if (const auto* cc = std::get_if<ConstantCurrentLoad>(&c.load)) {
        load = json{{"type", "constant_current"},
                    {"current_A", cc->current},
                    {"direction", std::string(to_string(cc->direction))}};
    } else {
        const auto& ind = std::get<InductorLoad>(c.load);
        load = json{{"type", "inductor"},
                    {"inductance_H", ind.inductance},
                    {"initial_current_A", ind.initial_current},
                    {"direction", std::string(to_string(ind.direction))}};
    }
    json j{{"v_dc_V", c.v_dc},
           {"gate_on_V", c.gate_on},
           {"gate_off_V", c.gate_off},
           {"r_g_s1_ohm", c.r_g_s1},
           {"r_g_s2_ohm", c.r_g_s2},
           {"load", load},
           {"scenario", std::string(to_string(c.scenario))},
           {"delta_v_V", c.delta_v},
           {"shoot_through_enabled", c.shoot_through_enabled}};
    json devices = json::object();
    if (c.dev_s1) {
        devices["s1"] = json{{"name", c.dev_s1->name}, {"fingerprint", device_fingerprint(*c.dev_s1)}};
    }
    if (c.dev_s2) {
        devices["s2"] = json{{"name", c.dev_s2->name}, {"fingerprint", device_fingerprint(*c.dev_s2)}};
    }
    j["devices"] = devices;
    return j;
}

json to_json(const RunConfig& cfg) {
    json j = circuit_to_json(cfg.circuit);
    j["devices"] = cfg.device_specs;
    j["solver"] = to_json(cfg.solver);
    j["t_end_s"] = cfg.t_end;
    return j;
}

std::string config_hash(const HalfBridgeConfig& c, const SolverSettings& s, Real t_end) {
    json j{{"circuit", circuit_to_json(c)}, {"solver", to_json(s)}, {"t_end_s", t_end}};
    return fnv1a_hex(j.dump());
}

}  // namespace turnon
