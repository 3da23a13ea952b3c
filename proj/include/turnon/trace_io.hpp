#pragma once

// WaveformTrace export and re-import: one CSV column per state, branch current
// and state derivative, plus a JSON sidecar holding the event markers.

#include "turnon/solver.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace turnon {

struct StateColumn {
    const char* name;
    Real CircuitState::*member;
};

struct CurrentColumn {
    const char* name;
    Real BranchCurrents::*member;
};

[[nodiscard]] const std::vector<StateColumn>& state_columns();
[[nodiscard]] const std::vector<CurrentColumn>& current_columns();
/// Names of the dx/dt columns, in state-vector order.
[[nodiscard]] const std::vector<std::string>& derivative_columns();

/// Writes the CSV; `manifest_hash` lands on a leading `# manifest_hash=` line.
void write_trace_csv(const std::filesystem::path& path, const WaveformTrace& trace,
                     const std::string& manifest_hash);
[[nodiscard]] WaveformTrace read_trace_csv(const std::filesystem::path& path);

[[nodiscard]] nlohmann::json markers_to_json(const std::vector<Marker>& markers);
[[nodiscard]] std::vector<Marker> markers_from_json(const nlohmann::json& j);

/// Linear interpolation of every stored column; used for traces without an
/// attached circuit (e.g. read back from CSV).
[[nodiscard]] std::pair<CircuitState, BranchCurrents> interpolate_sample(const WaveformTrace& trace,
                                                                         Real time);

}  // namespace turnon
