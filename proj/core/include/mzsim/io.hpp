#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "mzsim/counting.hpp"
#include "mzsim/multiplex.hpp"
#include "mzsim/spectrum.hpp"
#include "mzsim/switching.hpp"
#include "mzsim/timeseries.hpp"

namespace mzsim::io {

// Shortest round-trip decimal form, locale independent.
std::string format_double(double v);

// All CSV files: header row, '.' decimal separator, LF line endings.
void write_series_csv(const std::filesystem::path& path, const TimeSeries& series);
void write_histogram_csv(const std::filesystem::path& path, const Histogram& hist);
void write_port_histograms_csv(const std::filesystem::path& path,
                               const switching::PortHistograms& hists);
void write_spectrum_csv(const std::filesystem::path& path,
                        const lock::Spectrum& spectrum);
void write_allan_csv(const std::filesystem::path& path,
                     const std::vector<lock::AllanPoint>& points);
void write_clicks_csv(const std::filesystem::path& path,
                      const std::vector<counting::ClickRecord>& clicks);

nlohmann::json schedule_to_json(const mux::RatioSchedule& schedule);
nlohmann::json distribution_to_json(const mux::BinDistribution& dist);
nlohmann::json response_matrix_to_json(const counting::ResponseMatrix& rm);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace mzsim::io
