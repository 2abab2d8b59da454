#pragma once

#include <cmath>
#include <limits>

#include "mzsim/errors.hpp"

namespace mzsim::optics {

// Nominal propagation speed, m/s. The device latency bookkeeping uses the
// 5 ns/m rule for n = 1.5 fiber, i.e. c = 3e8 exactly.
inline constexpr double kSpeedOfLightMps = 3.0e8;

inline constexpr double kDefaultGroupIndex = 1.5;

// Static model of the MZI as a 2x2 variable coupler.
//
// Phase convention: transmit = (1 - V cos(phase)) / 2, so phase = 0 is the
// maximally reflecting (0:100) state and phase = pi the maximally
// transmitting one. bias_phase is the interferometer phase at zero drive
// voltage (the dispersion-compensator offset).
struct CouplerModel {
  double visibility = 0.9955;
  double insertion_loss_db = 0.0;
  double v_pi = 2.2;
  double bias_phase = 0.0;
  double drive_min_v = 0.0;
  double drive_max_v = 2.2;

  bool valid() const {
    return visibility >= 0.0 && visibility <= 1.0 && v_pi > 0.0 &&
           insertion_loss_db >= 0.0 && drive_max_v > drive_min_v;
  }

  // Smallest transmit fraction reachable given the finite visibility.
  double min_transmit() const { return (1.0 - visibility) / 2.0; }
  double max_transmit() const { return (1.0 + visibility) / 2.0; }

  // Power fraction surviving the device (both outputs combined).
  double loss_factor() const {
    return std::pow(10.0, -insertion_loss_db / 10.0);
  }
};

// Power splitting of the coupler. reflect is never stored; the pair always
// sums to one exactly.
struct SplitRatio {
  double transmit = 0.5;
  double reflect() const { return 1.0 - transmit; }
};

// Pure splitting map; insertion loss is not applied here.
SplitRatio transmittance(double phase_rad, const CouplerModel& model);

// Inverse map on the [0, pi] branch. Throws UnreachableRatio when the
// target lies outside the visibility-limited band.
double phase_for_ratio(SplitRatio target, const CouplerModel& model);

// Linear EOM drive map: volts = (phase - bias_phase) * v_pi / pi.
// Throws DriveRangeExceeded outside [drive_min_v, drive_max_v].
double voltage_for_phase(double phase_rad, const CouplerModel& model);

double phase_for_voltage(double volts, const CouplerModel& model);

// 10*log10((1+V)/(1-V)). Returns +inf at V = 1; that is the flagged
// infinite-extinction case, not a failure.
double extinction_ratio_db(const CouplerModel& model);

inline bool infinite_extinction(const CouplerModel& model) {
  return model.visibility >= 1.0;
}

// Propagation delay of length_m of fiber with the given group index.
double fiber_delay_ns(double length_m, double group_index = kDefaultGroupIndex);

// Linearized reference-to-signal crosstalk probability for one time bin.
// Valid for rate * bin << 1.
double crosstalk_probability(double rate_per_s, double bin_ns);

}  // namespace mzsim::optics
