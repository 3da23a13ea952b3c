#pragma once

// Strict reader for JSON objects: every key must be known, every value typed.

#include "turnon/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <set>
#include <string>

namespace turnon::detail {

class Fields {
public:
    Fields(const nlohmann::json& obj, std::string context, std::set<std::string> allowed)
        : obj_(obj), context_(std::move(context)) {
        if (!obj_.is_object()) {
            throw ConfigError(where("") + "expected a JSON object");
        }
        for (auto it = obj_.begin(); it != obj_.end(); ++it) {
            if (!allowed.count(it.key())) {
                throw ConfigError(where(it.key()) + "unknown key");
            }
        }
    }

    [[nodiscard]] bool has(const std::string& key) const { return obj_.contains(key); }

    [[nodiscard]] const nlohmann::json& raw(const std::string& key) const {
        if (!has(key)) {
            throw ConfigError(where(key) + "missing required key");
        }
        return obj_.at(key);
    }

    [[nodiscard]] double number(const std::string& key) const {
        const nlohmann::json& v = raw(key);
        if (!v.is_number()) {
            throw ConfigError(where(key) + "expected a number");
        }
        const double d = v.get<double>();
        if (!std::isfinite(d)) {
            throw ConfigError(where(key) + "must be finite");
        }
        return d;
    }

    [[nodiscard]] double number(const std::string& key, double fallback) const {
        return has(key) ? number(key) : fallback;
    }

    [[nodiscard]] std::string text(const std::string& key) const {
        const nlohmann::json& v = raw(key);
        if (!v.is_string()) {
            throw ConfigError(where(key) + "expected a string");
        }
        return v.get<std::string>();
    }

    [[nodiscard]] std::string text(const std::string& key, const std::string& fallback) const {
        return has(key) ? text(key) : fallback;
    }

    [[nodiscard]] bool flag(const std::string& key, bool fallback) const {
        if (!has(key)) {
            return fallback;
        }
        const nlohmann::json& v = obj_.at(key);
        if (!v.is_boolean()) {
            throw ConfigError(where(key) + "expected true or false");
        }
        return v.get<bool>();
    }

    [[nodiscard]] std::string where(const std::string& key) const {
        std::string path = context_;
        if (!key.empty()) {
            path += path.empty() ? key : "." + key;
        }
        return path.empty() ? std::string() : path + ": ";
    }

private:
    const nlohmann::json& obj_;
    std::string context_;
};

}  // namespace turnon::detail
