#include "config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "mzsim/errors.hpp"

namespace mzsim::cli {

using nlohmann::json;

json default_config() {
  json cfg;
  cfg["schema_version"] = kSchemaVersion;
  cfg["master_seed"] = 1;
  cfg["output_dir"] = "";

  cfg["coupler"] = {
      {"visibility", 0.9955},
      {"insertion_loss_db", 0.0},
      {"v_pi", 2.2},
      {"bias_phase", 0.0},
      {"drive_min_v", 0.0},
      {"drive_max_v", 2.2},
      {"measured_extinction_db", nullptr},
      {"fiber_length_m", 9.0},
      {"group_index", 1.5},
      {"crosstalk_rate_per_s", 10.0},
      {"crosstalk_bin_ns", 100.0},
  };

  cfg["lock"] = {
      {"duration_s", 600.0},
      {"dt_s", 1e-4},
      {"spectrum_segment", 0},
      {"csv_max_rows", 200000},
      {"autotune", false},
      {"wavelength_signal_nm", 810.0},
      {"noise",
       {{"drift_rw_deg_per_sqrt_s", 6.0},
        {"acoustic_lines",
         json::array({{{"frequency_hz", 7.0}, {"amplitude_deg", 1.0}, {"phase_rad", 0.0}},
                      {{"frequency_hz", 50.0}, {"amplitude_deg", 0.2}, {"phase_rad", 1.0}}})}}},
      {"readout",
       {{"reference_power_w", 100e-12},
        {"responsivity_v_per_w", 1e9},
        {"nep_w_per_sqrt_hz", 9e-15},
        {"detection_bandwidth_hz", 5000.0},
        {"amplitude_flicker_rel", 0.05},
        {"visibility", 1.0},
        {"sensor_imbalance_rw_per_sqrt_s", 5e-5}}},
      {"stretcher",
       {{"range_um", 35.0}, {"wavelength_nm", 830.0}, {"bandwidth_hz", 1000.0}}},
      {"gains",
       {{"kp", 0.1}, {"ki", 170.0}, {"kd", 0.0}, {"loop_bandwidth_hz", 30.0}}},
  };

  cfg["switch"] = {
      {"from_ratio", "100:0"},
      {"to_ratio", "0:100"},
      {"events", 1000000},
      {"dt_ns", 0.002},
      {"window_ns", 16.0},
      {"edge_time_ns", 5.0},
      {"pulse",
       {{"edge_rise_ns", 0.4},
        {"duration_ns", 0.0},
        {"quantize", false},
        {"quantization_step_db", 0.5},
        {"quantization_bits", 6}}},
      {"chain",
       {{"eom_bandwidth_ghz", 10.0},
        {"spad_jitter_ns", 0.3},
        {"tagger_resolution_ns", 0.16},
        {"control_rise_ns", 0.4}}},
  };

  cfg["schedule"] = {
      {"bins", 4},
      {"eta", 0.2},
      {"min_release", (1.0 - 0.9955) / 2.0},
      {"loop_delay_ns", 60.0},
      {"target", nullptr},
      {"max_bins_cap", 64},
  };

  cfg["pnr"] = {
      {"bins", 4},
      {"bin_probabilities", nullptr},
      {"efficiency", 1.0},
      {"n_max", 4},
      {"mc_trials", 1000000},
      {"max_bins_limit", 20},
  };

  cfg["qudit"] = {
      {"eta", 0.2},
      {"min_release", (1.0 - 0.9955) / 2.0},
      {"loop_delay_ns", 60.0},
      {"targets",
       json::array({json::array({0.25, 0.25, 0.25, 0.25}),
                    json::array({0.4, 0.3, 0.2, 0.1}),
                    json::array({0.15, 0.2, 0.3, 0.35}),
                    json::array({0.7, 0.1, 0.1, 0.1}),
                    json::array({0.1, 0.4, 0.4, 0.1}),
                    json::array({0.35, 0.15, 0.35, 0.15})})},
      {"pulses", 200000},
      {"mean_photons", 0.5},
      {"spad",
       {{"efficiency", 1.0},
        {"jitter_ns", 0.3},
        {"dead_time_ns", 25.0},
        {"afterpulse_prob", 0.0},
        {"dark_rate_hz", 0.0}}},
  };

  return cfg;
}

namespace {

// Paths where null is a valid stand-in for an optional value.
const std::set<std::string>& nullable_paths() {
  static const std::set<std::string> paths = {
      "/coupler/measured_extinction_db",
      "/schedule/target",
      "/pnr/bin_probabilities",
  };
  return paths;
}

bool is_number(const json& j) { return j.is_number(); }

void fail(const std::string& path, const std::string& what) {
  throw ConfigInvalid("config key '" + (path.empty() ? "/" : path) + "' " + what);
}

void validate_node(const json& schema, const json& user, const std::string& path) {
  if (nullable_paths().count(path)) {
    if (user.is_null()) return;
    if (user.is_array()) {
      for (const auto& v : user)
        if (!is_number(v)) fail(path, "must contain numbers");
      return;
    }
    if (is_number(user)) return;
    fail(path, "must be null, a number, or an array of numbers");
  }

  if (schema.is_object()) {
    if (!user.is_object()) fail(path, "must be an object");
    for (const auto& [key, value] : user.items()) {
      if (!schema.contains(key)) fail(path + "/" + key, "is not a known key");
      validate_node(schema.at(key), value, path + "/" + key);
    }
    return;
  }
  if (schema.is_array()) {
    if (!user.is_array()) fail(path, "must be an array");
    if (!schema.empty() && schema.front().is_object()) {
      for (std::size_t i = 0; i < user.size(); ++i)
        validate_node(schema.front(), user.at(i),
                      path + "/" + std::to_string(i));
      return;
    }
    if (!schema.empty() && schema.front().is_array()) {
      for (std::size_t i = 0; i < user.size(); ++i) {
        if (!user.at(i).is_array())
          fail(path + "/" + std::to_string(i), "must be an array of numbers");
        for (const auto& v : user.at(i))
          if (!is_number(v)) fail(path + "/" + std::to_string(i),
                                  "must contain numbers");
      }
      return;
    }
    for (const auto& v : user)
      if (!is_number(v)) fail(path, "must contain numbers");
    return;
  }
  if (schema.is_number()) {
    if (!is_number(user)) fail(path, "must be a number");
    return;
  }
  if (schema.is_boolean()) {
    if (!user.is_boolean()) fail(path, "must be a boolean");
    return;
  }
  if (schema.is_string()) {
    if (!user.is_string()) fail(path, "must be a string");
    return;
  }
  if (schema.is_null()) return;
  fail(path, "has an unsupported type");
}

void merge_into(json& base, const json& user) {
  for (const auto& [key, value] : user.items()) {
    if (value.is_object() && base.contains(key) && base.at(key).is_object()) {
      merge_into(base.at(key), value);
    } else {
      base[key] = value;
    }
  }
}

}  // namespace

void validate_config(const json& user) {
  const json schema = default_config();
  if (!user.is_object()) throw ConfigInvalid("config document must be a JSON object");
  validate_node(schema, user, "");
  if (user.contains("schema_version") &&
      user.at("schema_version").get<int>() != kSchemaVersion) {
    std::ostringstream msg;
    msg << "config key 'schema_version' must be " << kSchemaVersion;
    throw ConfigInvalid(msg.str());
  }
}

json resolve_config(const json& user) {
  validate_config(user);
  json resolved = default_config();
  merge_into(resolved, user);
  if (resolved.at("output_dir").get<std::string>().empty()) {
    const char* env = std::getenv(kOutputDirEnvVar);
    resolved["output_dir"] = env != nullptr ? env : ".";
  }
  return resolved;
}

json load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigInvalid("cannot open config file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigInvalid("config file " + path.string() + " is not valid JSON: " +
                        e.what());
  }
  return j;
}

double parse_ratio(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw ConfigInvalid("ratio '" + text + "' must use the T:R form, e.g. 100:0");
  try {
    const double t = std::stod(text.substr(0, colon));
    const double r = std::stod(text.substr(colon + 1));
    if (t < 0.0 || r < 0.0 || t + r <= 0.0)
      throw ConfigInvalid("ratio '" + text + "' must have non-negative parts");
    return t / (t + r);
  } catch (const std::invalid_argument&) {
    throw ConfigInvalid("ratio '" + text + "' is not numeric");
  }
}

}  // namespace mzsim::cli
