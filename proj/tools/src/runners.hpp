#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

namespace mzsim::cli {

// Each runner consumes a resolved config, writes the resolved-config echo,
// its summary.json, run_info.json and the data files into the output
// directory, and returns the summary document.
nlohmann::json run_coupler(const nlohmann::json& resolved);
nlohmann::json run_lock(const nlohmann::json& resolved);
nlohmann::json run_switch(const nlohmann::json& resolved);
nlohmann::json run_schedule(const nlohmann::json& resolved);
nlohmann::json run_pnr(const nlohmann::json& resolved);
nlohmann::json run_qudit(const nlohmann::json& resolved);

nlohmann::json run_subcommand(const std::string& name,
                              const nlohmann::json& resolved);

std::filesystem::path output_dir(const nlohmann::json& resolved);

}  // namespace mzsim::cli
