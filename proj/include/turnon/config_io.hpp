#pragma once

// Run configuration files. Keys carry their unit as a suffix:
//
//   {
//     "v_dc_V": 400, "gate_on_V": 20, "gate_off_V": -4,
//     "r_g_s1_ohm": 10, "r_g_s2_ohm": 10,
//     "load": {"type": "constant_current", "current_A": 20, "direction": "out_of_midpoint"},
//     "scenario": "iZVS_case2", "delta_v_V": 255, "shoot_through_enabled": false,
//     "devices": {"s1": "devices/a.json", "s2": {"synthetic": {"v_th_V": 2.6}}},
//     "solver": {"rel_tol": 1e-7, "abs_tol": 1e-9, "max_step_s": 1e-9},
//     "t_end_s": 2e-7
//   }
//
// A device is either a manifest path (relative to the config file) or an
// inline {"synthetic": {...}} parameter block. Inductor loads use
// {"type": "inductor", "inductance_H", "initial_current_A", "direction"}.

#include "turnon/circuit.hpp"
#include "turnon/solver.hpp"
#include "turnon/synthetic_device.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace turnon {

struct RunConfig {
    HalfBridgeConfig circuit;
    SolverSettings solver;
    Real t_end = 200e-9;
    /// Device entries as written in the file, kept for round-tripping.
    nlohmann::json device_specs = nlohmann::json::object();
};

[[nodiscard]] RunConfig run_config_from_json(const nlohmann::json& j,
                                             const std::filesystem::path& base_dir);
[[nodiscard]] RunConfig load_run_config(const std::filesystem::path& path);
[[nodiscard]] nlohmann::json to_json(const RunConfig& cfg);

[[nodiscard]] SolverSettings solver_settings_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json to_json(const SolverSettings& s);

[[nodiscard]] SyntheticDeviceParams synthetic_params_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json to_json(const SyntheticDeviceParams& p);

/// Circuit scalars plus device fingerprints, canonical key order.
[[nodiscard]] nlohmann::json circuit_to_json(const HalfBridgeConfig& c);

/// FNV-1a over the canonical JSON of the circuit, solver settings and t_end.
[[nodiscard]] std::string config_hash(const HalfBridgeConfig& c, const SolverSettings& s, Real t_end);

}  // namespace turnon
