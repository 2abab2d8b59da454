#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace mzsim {

// Uniformly sampled real-valued trace; the universal result carrier.
struct TimeSeries {
  double dt_s = 0.0;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double duration_s() const { return dt_s * static_cast<double>(values.size()); }
  double time_at(std::size_t i) const { return dt_s * static_cast<double>(i); }
};

inline double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double variance(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size());
}

inline double stddev(const std::vector<double>& v) { return std::sqrt(variance(v)); }

// Binned count record. Counts are doubles so that expectation-based
// corrections (e.g. afterpulse subtraction) stay representable.
struct Histogram {
  double t0_ns = 0.0;
  double bin_width_ns = 1.0;
  std::vector<double> counts;

  std::size_t size() const { return counts.size(); }
  double bin_start_ns(std::size_t i) const {
    return t0_ns + bin_width_ns * static_cast<double>(i);
  }
  double bin_center_ns(std::size_t i) const {
    return bin_start_ns(i) + 0.5 * bin_width_ns;
  }
  double total() const {
    double s = 0.0;
    for (double c : counts) s += c;
    return s;
  }

  // Index of the bin containing t_ns, or -1 when outside the range.
  long long bin_index(double t_ns) const {
    const double x = (t_ns - t0_ns) / bin_width_ns;
    if (x < 0.0 || x >= static_cast<double>(counts.size())) return -1;
    return static_cast<long long>(x);
  }
};

}  // namespace mzsim
