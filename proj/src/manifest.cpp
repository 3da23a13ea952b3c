#include "turnon/manifest.hpp"

#include "turnon/device_io.hpp"
#include "turnon/errors.hpp"

#include <fstream>
#include <iterator>

namespace turnon {

std::string file_digest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError(path.string() + ": cannot open");
    }
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return fnv1a_hex(bytes);
}

void RunManifest::add_input(const std::string& role, const std::filesystem::path& path) {
    input_hashes[role] = file_digest(path);
}

std::string RunManifest::hash() const {
    const nlohmann::json j{{"subcommand", subcommand},
                           {"parameters", parameters},
                           {"tool_version", tool_version},
                           {"input_hashes", input_hashes}};
    return fnv1a_hex(j.dump());
}

nlohmann::json to_json(const RunManifest& m) {
    nlohmann::json devices = nlohmann::json::object();
    for (const auto& [role, p] : m.device_paths) devices[role] = p.string();
    return {{"subcommand", m.subcommand},
            {"config_path", m.config_path.string()},
            {"device_paths", devices},
            {"output_dir", m.output_dir.string()},
            {"parameters", m.parameters},
            {"tool_version", m.tool_version},
            {"input_hashes", m.input_hashes},
            {"manifest_hash", m.hash()}};
}

}  // namespace turnon
