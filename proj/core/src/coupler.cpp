#include "mzsim/coupler.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace mzsim::optics {

namespace {
constexpr double kPi = std::numbers::pi;
}

SplitRatio transmittance(double phase_rad, const CouplerModel& model) {
  return SplitRatio{(1.0 - model.visibility * std::cos(phase_rad)) / 2.0};
}

double phase_for_ratio(SplitRatio target, const CouplerModel& model) {
  const double lo = model.min_transmit();
  const double hi = model.max_transmit();
  if (target.transmit < lo || target.transmit > hi) {
    std::ostringstream msg;
    msg << "transmit fraction " << target.transmit
        << " outside the reachable band [" << lo << ", " << hi
        << "] for visibility " << model.visibility;
    throw UnreachableRatio(msg.str());
  }
  const double c = (1.0 - 2.0 * target.transmit) / model.visibility;
  return std::acos(std::clamp(c, -1.0, 1.0));
}

double voltage_for_phase(double phase_rad, const CouplerModel& model) {
  const double volts = (phase_rad - model.bias_phase) * model.v_pi / kPi;
  // Tolerate sub-ULP excursions at the window ends.
  const double slack = 1e-12 * std::max(1.0, std::abs(model.drive_max_v));
  if (volts < model.drive_min_v - slack || volts > model.drive_max_v + slack) {
    std::ostringstream msg;
    msg << "phase " << phase_rad << " rad needs " << volts
        << " V, outside the drive window [" << model.drive_min_v << ", "
        << model.drive_max_v << "] V";
    throw DriveRangeExceeded(msg.str());
  }
  return std::clamp(volts, model.drive_min_v, model.drive_max_v);
}

double phase_for_voltage(double volts, const CouplerModel& model) {
  return model.bias_phase + volts * kPi / model.v_pi;
}

double extinction_ratio_db(const CouplerModel& model) {
  if (model.visibility >= 1.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10((1.0 + model.visibility) / (1.0 - model.visibility));
}

double fiber_delay_ns(double length_m, double group_index) {
  return length_m * group_index / kSpeedOfLightMps * 1e9;
}

double crosstalk_probability(double rate_per_s, double bin_ns) {
  return rate_per_s * bin_ns * 1e-9;
}

}  // namespace mzsim::optics
