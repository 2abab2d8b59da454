#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mzsim/coupler.hpp"
#include "mzsim/rng.hpp"
#include "mzsim/timeseries.hpp"

namespace mzsim::lock {

// One sinusoidal disturbance of the interferometer phase.
struct AcousticLine {
  double frequency_hz = 0.0;
  double amplitude_deg = 0.0;
  double phase_rad = 0.0;
};

// Phase-noise plant: a random-walk drift plus discrete acoustic lines.
struct PhaseNoiseConfig {
  double drift_rw_deg_per_sqrt_s = 0.0;
  std::vector<AcousticLine> acoustic_lines;
  std::uint64_t seed = 1;

  bool valid() const {
    if (drift_rw_deg_per_sqrt_s < 0.0) return false;
    for (const auto& l : acoustic_lines)
      if (l.frequency_hz <= 0.0 || l.amplitude_deg < 0.0) return false;
    return true;
  }
};

// Reference-beam readout chain: two photodiodes plus lumped amplifier.
// sensor_imbalance_rw_per_sqrt_s models a slow differential gain drift of
// the diode pair; it shifts the error-signal zero and therefore sets the
// long-term floor of the lock (the common-mode flicker does not - the
// normalized error signal cancels it).
struct ReferenceReadout {
  double reference_power_w = 100e-12;
  double responsivity_v_per_w = 1e9;
  double nep_w_per_sqrt_hz = 9e-15;
  double detection_bandwidth_hz = 5e3;
  double amplitude_flicker_rel = 0.0;
  double visibility = 1.0;
  double sensor_imbalance_rw_per_sqrt_s = 0.0;

  bool valid() const {
    return reference_power_w > 0.0 && responsivity_v_per_w > 0.0 &&
           nep_w_per_sqrt_hz > 0.0 && detection_bandwidth_hz > 0.0 &&
           amplitude_flicker_rel >= 0.0 && visibility >= 0.0 &&
           visibility <= 1.0 && sensor_imbalance_rw_per_sqrt_s >= 0.0;
  }

  // Additive white-noise std on each photodiode sample, volts.
  double noise_volts() const {
    return nep_w_per_sqrt_hz * std::sqrt(detection_bandwidth_hz) *
           responsivity_v_per_w;
  }
};

// Fiber-stretcher actuator: range clamp plus first-order low pass.
struct StretcherModel {
  double range_um = 35.0;
  double wavelength_nm = 830.0;
  double bandwidth_hz = 1e3;

  bool valid() const {
    return range_um > 0.0 && wavelength_nm > 0.0 && bandwidth_hz > 0.0;
  }

  // Full actuator range in radians: 2*pi * range / wavelength.
  double range_radians() const {
    return 2.0 * 3.14159265358979323846 * (range_um * 1000.0) / wavelength_nm;
  }
};

struct PidGains {
  double kp = 0.1;
  double ki = 170.0;
  double kd = 0.0;
  double loop_bandwidth_hz = 30.0;

  bool valid() const {
    return std::isfinite(kp) && std::isfinite(ki) && std::isfinite(kd) &&
           loop_bandwidth_hz > 0.0;
  }
};

// Actuator range clamp engagement, reported but not fatal.
struct SaturationEvent {
  double time_s = 0.0;
  double commanded_rad = 0.0;
};

struct LockRunResult {
  TimeSeries phase_error;    // locked phase minus the pi/2 setpoint, rad
  TimeSeries transmittance;  // signal-coupler transmit fraction
  TimeSeries actuator;       // stretcher phase, rad
  TimeSeries unlocked;       // open-loop phase excursion from the same noise
  std::vector<SaturationEvent> saturation_events;
};

// Plant noise trace (radians). Deterministic for a given seed: random-walk
// increments of std drift*sqrt(dt) plus the acoustic lines superposed
// exactly.
TimeSeries simulate_phase_noise(const PhaseNoiseConfig& cfg, double duration_s,
                                double dt_s);

// Ideal fringe powers P*(1 +- V cos(phi))/2 through the responsivity, plus
// additive white readout noise. common_mode_gain scales both diodes
// (reference amplitude flicker), imbalance tilts them differentially.
std::pair<double, double> photodiode_signals(double phase_rad,
                                             const ReferenceReadout& readout,
                                             RngStream& rng,
                                             double common_mode_gain = 1.0,
                                             double imbalance = 0.0);

// Normalized two-diode error signal (v1 - v2)/(v1 + v2). Zero at the pi/2
// lock point, immune to common-mode amplitude scaling. Throws SignalLost
// when the sum drops below min_sum_volts.
double error_signal(double v1, double v2, double min_sum_volts = 1e-9);

// Discrete-time closed-loop simulation. Per step: noise advance ->
// photodiode read -> error -> velocity-form PID (anti-windup clamp at the
// actuator range) -> actuator low-pass and range clamp -> the correction
// applies on the next step. Positive error drives the actuator to decrease
// its phase pull (the stretcher phase subtracts from the plant phase).
// The returned `unlocked` trace is the open-loop excursion from identical
// plant noise draws.
LockRunResult run_closed_loop(const PhaseNoiseConfig& plant,
                              const ReferenceReadout& readout,
                              const StretcherModel& stretcher,
                              const PidGains& gains,
                              const optics::CouplerModel& coupler,
                              double duration_s, double dt_s);

// Measured closed-loop bandwidth: the frequency where the paired
// closed/open disturbance-rejection ratio crosses -3 dB. Runs a dedicated
// drift-only calibration plant.
double measure_closed_loop_bandwidth(const ReferenceReadout& readout,
                                     const StretcherModel& stretcher,
                                     const PidGains& gains, double dt_s,
                                     std::uint64_t seed = 20240501);

// Scans ki until the measured closed-loop bandwidth meets
// gains.loop_bandwidth_hz. kp and kd are kept as configured.
PidGains tune_integral_gain(const ReferenceReadout& readout,
                            const StretcherModel& stretcher, PidGains start,
                            double dt_s, int max_iterations = 6);

// Optical path difference equivalent of a phase excursion.
double phase_to_path_nm(double phase_deg, double wavelength_nm);

// Desk-scale disturbance scenario used by the CLI defaults: slow
// temperature random walk, a mild acoustic line inside the loop bandwidth
// and one above it, a touch of differential sensor drift. The open loop is
// unusable within seconds; the closed loop stays locked at sub-degree
// level.
PhaseNoiseConfig default_desk_noise();
ReferenceReadout default_readout();

inline constexpr double kDefaultLockDt = 1e-4;
inline constexpr double kLockSetpointRad = 1.5707963267948966;  // pi/2

}  // namespace mzsim::lock
