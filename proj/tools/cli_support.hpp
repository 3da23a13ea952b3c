#pragma once

// Shared plumbing for the turnon subcommands: config overrides, device
// arguments, prediction rows and hashed output files.

#include "turnon/config_io.hpp"
#include "turnon/energy.hpp"
#include "turnon/manifest.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace turnon::cli {

namespace fs = std::filesystem;

nlohmann::json read_json_file(const fs::path& path);

/// Applies `a.b.c=value` to j. The value is parsed as JSON when it can be,
/// otherwise taken as a string.
void apply_override(nlohmann::json& j, const std::string& assignment);

/// A device manifest, or a file holding {"synthetic": {...}}.
std::shared_ptr<const DeviceModel> load_device_arg(const fs::path& path);

/// Config file plus overrides, with the device manifests it references recorded on m.
RunConfig load_config_with_overrides(const fs::path& path, const std::vector<std::string>& overrides,
                                     RunManifest& m);

struct PredictionPoint {
    Real v_dc = 0.0;
    Real delta_v = 0.0;
    Real i_load = 0.0;
    Real conventional = 0.0;
    ProposedPrediction proposed;
};

PredictionPoint predict_point(const DeviceModel& s1, const DeviceModel& s2, Real c_par_s1, Real c_par_s2,
                              Real v_dc, Real delta_v, Real i_load, const ModeAssumptions& mode);

/// Column names and values shared by `predict` and `sweep --mode predict`.
const std::vector<std::string>& prediction_columns();
std::vector<std::string> prediction_cells(const PredictionPoint& p);
nlohmann::json to_json(const PredictionPoint& p);

/// CSV cell formatting used by every table.
std::string cell(Real v);

void write_text(const fs::path& path, const std::string& text);
/// JSON object with a top-level manifest_hash field.
void write_json(const fs::path& path, nlohmann::json j, const RunManifest& m);
/// CSV with a leading `# manifest_hash=` line.
void write_csv(const fs::path& path, const std::string& body, const RunManifest& m);
void write_manifest(const fs::path& dir, const RunManifest& m);

}  // namespace turnon::cli
