#include "mzsim/io.hpp"

#include <charconv>
#include <fstream>

#include "mzsim/errors.hpp"

namespace mzsim::io {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SimError("cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_series_csv(const std::filesystem::path& path, const TimeSeries& series) {
  auto out = open_out(path);
  out << "time_s,value\n";
  for (std::size_t i = 0; i < series.size(); ++i)
    out << format_double(series.time_at(i)) << ',' << format_double(series.values[i])
        << '\n';
}

void write_histogram_csv(const std::filesystem::path& path, const Histogram& hist) {
  auto out = open_out(path);
  out << "bin_start_ns,count\n";
  for (std::size_t i = 0; i < hist.size(); ++i)
    out << format_double(hist.bin_start_ns(i)) << ',' << format_double(hist.counts[i])
        << '\n';
}

void write_port_histograms_csv(const std::filesystem::path& path,
                               const switching::PortHistograms& hists) {
  auto out = open_out(path);
  out << "bin_start_ns,count_port1,count_port2\n";
  for (std::size_t i = 0; i < hists.port1.size(); ++i)
    out << format_double(hists.port1.bin_start_ns(i)) << ','
        << format_double(hists.port1.counts[i]) << ','
        << format_double(hists.port2.counts[i]) << '\n';
}

void write_spectrum_csv(const std::filesystem::path& path,
                        const lock::Spectrum& spectrum) {
  auto out = open_out(path);
  out << "frequency_hz,density\n";
  for (std::size_t i = 0; i < spectrum.frequency_hz.size(); ++i)
    out << format_double(spectrum.frequency_hz[i]) << ','
        << format_double(spectrum.density[i]) << '\n';
}

void write_allan_csv(const std::filesystem::path& path,
                     const std::vector<lock::AllanPoint>& points) {
  auto out = open_out(path);
  out << "tau_s,sigma\n";
  for (const auto& p : points)
    out << format_double(p.tau_s) << ',' << format_double(p.sigma) << '\n';
}

void write_clicks_csv(const std::filesystem::path& path,
                      const std::vector<counting::ClickRecord>& clicks) {
  auto out = open_out(path);
  out << "detector_id,time_ns,origin\n";
  for (const auto& c : clicks)
    out << c.detector_id << ',' << format_double(c.time_ns) << ','
        << counting::to_string(c.origin) << '\n';
}

nlohmann::json schedule_to_json(const mux::RatioSchedule& schedule) {
  return nlohmann::json{{"releases", schedule.releases},
                        {"feasible", schedule.feasible}};
}

nlohmann::json distribution_to_json(const mux::BinDistribution& dist) {
  return nlohmann::json{{"probabilities", dist.probabilities},
                        {"survival", dist.survival},
                        {"loss", dist.loss}};
}

nlohmann::json response_matrix_to_json(const counting::ResponseMatrix& rm) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t m = 0; m <= rm.n_bins; ++m) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t n = 0; n <= rm.n_max; ++n) row.push_back(rm.at(m, n));
    rows.push_back(row);
  }
  return nlohmann::json{{"n_bins", rm.n_bins},
                        {"n_max", rm.n_max},
                        {"bin_probabilities", rm.bin_probabilities},
                        {"rows_are_click_counts", true},
                        {"p_clicks_given_photons", rows}};
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

}  // namespace mzsim::io
