#pragma once

// Provenance record written next to every CLI output.

#include <json.hpp>

#include <filesystem>
#include <map>
#include <string>

namespace turnon {

inline constexpr const char* kToolVersion = "0.3.0";

struct RunManifest {
    std::string subcommand;
    std::filesystem::path config_path;
    std::map<std::string, std::filesystem::path> device_paths;  // role -> manifest file
    std::filesystem::path output_dir;
    nlohmann::json parameters = nlohmann::json::object();
    std::string tool_version = kToolVersion;
    std::map<std::string, std::string> input_hashes;  // role -> content digest

    /// Records the content digest of an input file under `role`.
    void add_input(const std::string& role, const std::filesystem::path& path);

    /// Digest over subcommand, parameters, version and input contents. Paths and
    /// the output directory are left out, so relocated inputs hash the same.
    [[nodiscard]] std::string hash() const;
};

/// FNV-1a digest of a file's bytes.
[[nodiscard]] std::string file_digest(const std::filesystem::path& path);

[[nodiscard]] nlohmann::json to_json(const RunManifest& m);

}  // namespace turnon
