#include "mzsim/spectrum.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

#include "mzsim/errors.hpp"

namespace mzsim::lock {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// FFTW planner calls are not thread safe; executions are.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

Spectrum noise_spectrum(const TimeSeries& series, std::size_t segment_len) {
  if (series.dt_s <= 0.0) throw ConfigInvalid("series dt must be positive");
  if (!is_power_of_two(segment_len))
    throw ConfigInvalid("segment length must be a power of two");
  if (series.size() < segment_len || series.size() < 2) {
    std::ostringstream msg;
    msg << "series of " << series.size() << " samples too short for segment "
        << segment_len;
    throw SeriesTooShort(msg.str());
  }

  const std::size_t nbins = segment_len / 2 + 1;
  std::vector<double> window(segment_len);
  double win_power = 0.0;
  for (std::size_t i = 0; i < segment_len; ++i) {
    window[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(i) /
                                      static_cast<double>(segment_len)));
    win_power += window[i] * window[i];
  }

  double* in;
  fftw_complex* out;
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> guard(planner_mutex());
    in = fftw_alloc_real(segment_len);
    out = fftw_alloc_complex(nbins);
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(segment_len), in, out,
                                FFTW_ESTIMATE);
  }

  std::vector<double> acc(nbins, 0.0);
  const std::size_t step = segment_len / 2;
  std::size_t nseg = 0;
  for (std::size_t start = 0; start + segment_len <= series.size(); start += step) {
    double seg_mean = 0.0;
    for (std::size_t i = 0; i < segment_len; ++i) seg_mean += series.values[start + i];
    seg_mean /= static_cast<double>(segment_len);
    for (std::size_t i = 0; i < segment_len; ++i)
      in[i] = (series.values[start + i] - seg_mean) * window[i];
    fftw_execute(plan);
    for (std::size_t i = 0; i < nbins; ++i) {
      const double re = out[i][0];
      const double im = out[i][1];
      acc[i] += re * re + im * im;
    }
    ++nseg;
  }

  {
    std::lock_guard<std::mutex> guard(planner_mutex());
    fftw_destroy_plan(plan);
    fftw_free(in);
    fftw_free(out);
  }

  Spectrum spec;
  spec.df_hz = 1.0 / (series.dt_s * static_cast<double>(segment_len));
  spec.frequency_hz.resize(nbins);
  spec.density.resize(nbins);
  const double norm = series.dt_s / (win_power * static_cast<double>(nseg));
  for (std::size_t i = 0; i < nbins; ++i) {
    spec.frequency_hz[i] = spec.df_hz * static_cast<double>(i);
    double d = acc[i] * norm;
    if (i != 0 && i != nbins - 1) d *= 2.0;  // fold negative frequencies
    spec.density[i] = d;
  }
  return spec;
}

std::vector<AllanPoint> allan_deviation(const TimeSeries& series,
                                        const std::vector<double>& taus_s) {
  if (series.dt_s <= 0.0) throw ConfigInvalid("series dt must be positive");
  if (series.size() < 3) throw SeriesTooShort("allan deviation needs >= 3 samples");

  std::vector<AllanPoint> out;
  out.reserve(taus_s.size());
  for (double tau : taus_s) {
    const double ratio = tau / series.dt_s;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
      std::ostringstream msg;
      msg << "tau " << tau << " s is not an integer multiple of dt "
          << series.dt_s << " s";
      throw InvalidTau(msg.str());
    }
    const std::size_t m = static_cast<std::size_t>(rounded);
    const std::size_t nblocks = series.size() / m;
    if (nblocks < 3) {
      std::ostringstream msg;
      msg << "tau " << tau << " s needs at least 3 blocks, series has "
          << nblocks;
      throw InvalidTau(msg.str());
    }

    double prev = 0.0;
    double sum_sq = 0.0;
    for (std::size_t b = 0; b < nblocks; ++b) {
      double avg = 0.0;
      for (std::size_t i = 0; i < m; ++i) avg += series.values[b * m + i];
      avg /= static_cast<double>(m);
      if (b > 0) {
        const double d = avg - prev;
        sum_sq += d * d;
      }
      prev = avg;
    }
    const double sigma = std::sqrt(0.5 * sum_sq / static_cast<double>(nblocks - 1));
    out.push_back({tau, sigma});
  }
  return out;
}

std::vector<double> default_allan_taus(const TimeSeries& series,
                                       std::size_t points_per_decade) {
  std::vector<double> taus;
  const std::size_t max_m = series.size() / 3;
  const double decades = std::log10(static_cast<double>(max_m));
  const std::size_t npts =
      static_cast<std::size_t>(decades * static_cast<double>(points_per_decade)) + 1;
  std::size_t last_m = 0;
  for (std::size_t i = 0; i <= npts; ++i) {
    const double lg = decades * static_cast<double>(i) / static_cast<double>(npts);
    const std::size_t m = static_cast<std::size_t>(std::round(std::pow(10.0, lg)));
    if (m == last_m || m < 1 || m > max_m) continue;
    last_m = m;
    taus.push_back(static_cast<double>(m) * series.dt_s);
  }
  return taus;
}

}  // namespace mzsim::lock
