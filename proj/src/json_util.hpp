#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "msk/errors.hpp"

namespace msk {

using Json = nlohmann::json;

/// Rejects keys outside `allowed` so config typos fail loudly.
inline void check_keys(const Json& obj, const std::vector<std::string>& allowed,
                       const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const auto& k : allowed)
            if (it.key() == k) { ok = true; break; }
        if (!ok) throw ConfigError(where + ": unknown key '" + it.key() + "'");
    }
}

inline double get_num(const Json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
    if (!obj[key].is_number()) throw ConfigError(where + ": key '" + key + "' must be a number");
    return obj[key].get<double>();
}

inline double get_num_or(const Json& obj, const std::string& key, double fallback) {
    if (!obj.contains(key)) return fallback;
    return obj[key].get<double>();
}

inline std::string get_str(const Json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
    if (!obj[key].is_string()) throw ConfigError(where + ": key '" + key + "' must be a string");
    return obj[key].get<std::string>();
}

inline Json parse_json_text(const std::string& text, const std::string& origin) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigError(origin + ": " + e.what());
    }
}

}  // namespace msk
