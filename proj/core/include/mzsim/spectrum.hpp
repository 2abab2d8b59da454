#pragma once

#include <cstddef>
#include <vector>

#include "mzsim/timeseries.hpp"

namespace mzsim::lock {

// One-sided power spectral density estimate. Sum of density * df equals
// the series variance (Parseval, up to windowing bias).
struct Spectrum {
  std::vector<double> frequency_hz;
  std::vector<double> density;  // units^2 / Hz
  double df_hz = 0.0;
};

// Averaged periodogram (Welch): Hann-windowed segments of length
// segment_len with half overlap. segment_len must be a power of two and
// no longer than the series.
Spectrum noise_spectrum(const TimeSeries& series, std::size_t segment_len);

struct AllanPoint {
  double tau_s = 0.0;
  double sigma = 0.0;
};

// Non-overlapping Allan deviation at the requested averaging times. Each
// tau must be an integer multiple m of the sample period with at least
// 3m samples available.
std::vector<AllanPoint> allan_deviation(const TimeSeries& series,
                                        const std::vector<double>& taus_s);

// Log-spaced tau grid covering [dt, duration/3], convenient for plots.
std::vector<double> default_allan_taus(const TimeSeries& series,
                                       std::size_t points_per_decade = 6);

}  // namespace mzsim::lock
