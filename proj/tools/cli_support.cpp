#include "cli_support.hpp"

#include "turnon/device_io.hpp"
#include "turnon/errors.hpp"
#include "turnon/synthetic_device.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace turnon::cli {

using nlohmann::json;

json read_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path.string() + ": cannot open");
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

void apply_override(json& j, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("--set " + assignment + ": expected key=value");
    }
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(text);
    } catch (const json::parse_error&) {
        value = text;
    }
    json* node = &j;
    std::stringstream ss(key);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        if (!node->is_object()) {
            throw ConfigError("--set " + key + ": '" + parts[i] + "' is not an object");
        }
        node = &(*node)[parts[i]];
    }
    if (!node->is_object()) {
        throw ConfigError("--set " + key + ": parent is not an object");
    }
    (*node)[parts.back()] = value;
}

std::shared_ptr<const DeviceModel> load_device_arg(const fs::path& path) {
    const json j = read_json_file(path);
    if (j.is_object() && j.contains("synthetic")) {
        if (j.size() != 1) {
            throw ConfigError(path.string() + ": a synthetic device file holds only the 'synthetic' key");
        }
        return std::make_shared<const DeviceModel>(make_synthetic_device(synthetic_params_from_json(j["synthetic"])));
    }
    return std::make_shared<const DeviceModel>(device_from_manifest_json(j, path.parent_path()));
}

RunConfig load_config_with_overrides(const fs::path& path, const std::vector<std::string>& overrides,
                                     RunManifest& m) {
    json j = read_json_file(path);
    for (const auto& o : overrides) apply_override(j, o);
    m.config_path = path;
    m.add_input("config", path);
    RunConfig rc = run_config_from_json(j, path.parent_path());
    if (j.contains("devices") && j["devices"].is_object()) {
        for (const auto& [role, spec] : j["devices"].items()) {
            if (spec.is_string()) {
                const fs::path p = path.parent_path() / spec.get<std::string>();
                m.device_paths[role] = p;
                m.add_input("device_" + role, p);
            }
        }
    }
    return rc;
}

PredictionPoint predict_point(const DeviceModel& s1, const DeviceModel& s2, Real c_par_s1, Real c_par_s2,
                              Real v_dc, Real delta_v, Real i_load, const ModeAssumptions& mode) {
    PredictionPoint p;
    p.v_dc = v_dc;
    p.delta_v = delta_v;
    p.i_load = i_load;
    p.conventional = predict_conventional(s1, s2, v_dc, delta_v);
    p.proposed = predict_proposed_analytic(s1, s2, c_par_s1, c_par_s2, v_dc, delta_v, i_load, mode);
    return p;
}

std::string cell(Real v) {
    if (!std::isfinite(v)) return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

const std::vector<std::string>& prediction_columns() {
    static const std::vector<std::string> cols{
        "v_dc_V",        "delta_v_V",       "i_load_A",           "e_conv_uJ",          "e_prop_uJ",
        "dc_source_uJ",  "load_charge_uJ",  "ac_link_uJ",         "s2_oss_stored_uJ",   "s2_shoot_through_uJ",
        "s2_par_stored_uJ", "s1_oss_discharge_uJ", "s1_par_discharge_uJ", "v_gp_V", "t_cc_ns", "t_vf_ns"};
    return cols;
}

std::vector<std::string> prediction_cells(const PredictionPoint& p) {
    const LedgerTerms& t = p.proposed.terms;
    return {cell(p.v_dc),
            cell(p.delta_v),
            cell(p.i_load),
            cell(1e6 * p.conventional),
            cell(1e6 * p.proposed.e_on),
            cell(1e6 * t.dc_source),
            cell(1e6 * t.load_charge),
            cell(1e6 * t.ac_link),
            cell(1e6 * t.s2_oss_stored),
            cell(1e6 * t.s2_shoot_through),
            cell(1e6 * t.s2_par_stored),
            cell(1e6 * t.s1_oss_discharge),
            cell(1e6 * t.s1_par_discharge),
            cell(p.proposed.v_gp),
            cell(1e9 * p.proposed.t_cc),
            cell(1e9 * p.proposed.t_vf)};
}

json to_json(const PredictionPoint& p) {
    return {{"v_dc_V", p.v_dc},
            {"delta_v_V", p.delta_v},
            {"i_load_A", p.i_load},
            {"e_on_conventional_J", p.conventional},
            {"e_on_proposed_J", p.proposed.e_on},
            {"terms", turnon::to_json(p.proposed.terms)},
            {"v_gp_V", p.proposed.v_gp},
            {"i_g_A", p.proposed.i_g},
            {"t_cc_s", p.proposed.t_cc},
            {"t_vf_s", p.proposed.t_vf},
            {"i_net_A", p.proposed.i_net},
            {"integral_v_ds_s1_Vs", p.proposed.integral_v_ds1}};
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) {
        throw ConfigError(path.string() + ": cannot write");
    }
    out << text;
}

void write_json(const fs::path& path, json j, const RunManifest& m) {
    if (!j.is_object()) j = json{{"data", j}};
    j["manifest_hash"] = m.hash();
    write_text(path, j.dump(2) + "\n");
}

void write_csv(const fs::path& path, const std::string& body, const RunManifest& m) {
    write_text(path, "# manifest_hash=" + m.hash() + "\n" + body);
}

void write_manifest(const fs::path& dir, const RunManifest& m) {
    write_text(dir / "manifest.json", turnon::to_json(m).dump(2) + "\n");
}

}  // namespace turnon::cli
