#pragma once

// Curve files and device manifests.
//
//   capacitance curve:  header `v,c`          (V, F)
//   I-V grid:           header `vgs,vds,id`   (V, V, A), long format
//   manifest (JSON):    iv_grid_csv, c_gd_csv, c_ds_csv (paths relative to the
//                       manifest), c_gs_F, c_par_gd_F, c_par_ds_F, v_th_V,
//                       q_rr_C, v_ee_ref_V, optional name

#include "turnon/device_model.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace turnon {

[[nodiscard]] CapacitanceCurve read_capacitance_csv(const std::filesystem::path& path);
void write_capacitance_csv(const std::filesystem::path& path, const CapacitanceCurve& curve);

[[nodiscard]] std::vector<IVSample> read_iv_csv(const std::filesystem::path& path);
void write_iv_csv(const std::filesystem::path& path, const IVGrid& grid);

[[nodiscard]] DeviceModel device_from_manifest_json(const nlohmann::json& manifest,
                                                    const std::filesystem::path& base_dir);
[[nodiscard]] DeviceModel load_device_manifest(const std::filesystem::path& path);

/// Writes `<stem>_iv.csv`, `<stem>_cgd.csv`, `<stem>_cds.csv` and `<stem>.json`
/// into dir and returns the manifest path.
std::filesystem::path write_device_files(const std::filesystem::path& dir, const std::string& stem,
                                         const DeviceModel& dev);

/// FNV-1a digest over every number that defines the device.
[[nodiscard]] std::string device_fingerprint(const DeviceModel& dev);

/// 64-bit FNV-1a of a byte string, as 16 hex digits.
[[nodiscard]] std::string fnv1a_hex(std::string_view bytes);

}  // namespace turnon
