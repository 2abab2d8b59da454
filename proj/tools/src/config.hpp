#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

namespace mzsim::cli {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kOutputDirEnvVar = "MZSIM_OUTPUT_DIR";

// The full default configuration: every key the tool understands, with its
// documented default value. Unknown keys in user configs are rejected.
nlohmann::json default_config();

// Throws ConfigInvalid naming the offending key when `user` contains keys
// or value types the schema does not allow.
void validate_config(const nlohmann::json& user);

// Defaults overlaid with the user document (validated first).
nlohmann::json resolve_config(const nlohmann::json& user);

nlohmann::json load_config_file(const std::filesystem::path& path);

// "T:R" percentage notation -> transmit fraction, e.g. "25:75" -> 0.25.
double parse_ratio(const std::string& text);

}  // namespace mzsim::cli
