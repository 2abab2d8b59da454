#include "mzsim/lock.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "mzsim/errors.hpp"
#include "mzsim/spectrum.hpp"

namespace mzsim::lock {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDegToRad = kPi / 180.0;

// Stream indices under a plant seed. Keeping the plant stream separate is
// what makes the closed and open traces a paired comparison.
enum StreamIndex : std::uint64_t {
  kPlantStream = 0,
  kReadoutStream = 1,
  kFlickerStream = 2,
  kImbalanceStream = 3,
};

void validate(const PhaseNoiseConfig& cfg) {
  if (!cfg.valid())
    throw ConfigInvalid("phase-noise config invalid (negative drift or bad line)");
}

}  // namespace

TimeSeries simulate_phase_noise(const PhaseNoiseConfig& cfg, double duration_s,
                                double dt_s) {
  validate(cfg);
  if (dt_s <= 0.0 || duration_s < dt_s)
    throw ConfigInvalid("simulate_phase_noise needs duration >= dt > 0");

  const std::size_t n = static_cast<std::size_t>(std::llround(duration_s / dt_s));
  RngStream rng(cfg.seed, kPlantStream);

  TimeSeries out;
  out.dt_s = dt_s;
  out.values.resize(n);

  const double step_std = cfg.drift_rw_deg_per_sqrt_s * kDegToRad * std::sqrt(dt_s);
  double walk = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (step_std > 0.0) walk += rng.normal(0.0, step_std);
    double x = walk;
    const double t = dt_s * static_cast<double>(k);
    for (const auto& line : cfg.acoustic_lines) {
      x += line.amplitude_deg * kDegToRad *
           std::sin(2.0 * kPi * line.frequency_hz * t + line.phase_rad);
    }
    out.values[k] = x;
  }
  return out;
}

std::pair<double, double> photodiode_signals(double phase_rad,
                                             const ReferenceReadout& readout,
                                             RngStream& rng,
                                             double common_mode_gain,
                                             double imbalance) {
  const double p = readout.reference_power_w * std::max(0.0, common_mode_gain);
  const double r = readout.responsivity_v_per_w;
  const double fringe = readout.visibility * std::cos(phase_rad);
  const double noise = readout.noise_volts();
  double v1 = p * (1.0 + fringe) / 2.0 * r * (1.0 + imbalance / 2.0);
  double v2 = p * (1.0 - fringe) / 2.0 * r * (1.0 - imbalance / 2.0);
  if (noise > 0.0) {
    v1 += rng.normal(0.0, noise);
    v2 += rng.normal(0.0, noise);
  }
  return {v1, v2};
}

double error_signal(double v1, double v2, double min_sum_volts) {
  const double sum = v1 + v2;
  if (sum < min_sum_volts) {
    std::ostringstream msg;
    msg << "photodiode sum " << sum << " V below the dropout floor "
        << min_sum_volts << " V";
    throw SignalLost(msg.str());
  }
  return (v1 - v2) / sum;
}

LockRunResult run_closed_loop(const PhaseNoiseConfig& plant,
                              const ReferenceReadout& readout,
                              const StretcherModel& stretcher,
                              const PidGains& gains,
                              const optics::CouplerModel& coupler,
                              double duration_s, double dt_s) {
  if (!readout.valid()) throw ConfigInvalid("reference readout invalid");
  if (!stretcher.valid()) throw ConfigInvalid("stretcher model invalid");
  if (!gains.valid()) throw ConfigInvalid("pid gains invalid");
  if (!coupler.valid()) throw ConfigInvalid("coupler model invalid");
  if (dt_s * gains.loop_bandwidth_hz > 0.05)
    throw ConfigInvalid("dt too coarse: dt * loop_bandwidth must be <= 0.05");

  const TimeSeries noise = simulate_phase_noise(plant, duration_s, dt_s);
  const std::size_t n = noise.size();

  RngStream readout_rng(plant.seed, kReadoutStream);
  RngStream flicker_rng(plant.seed, kFlickerStream);
  RngStream imbalance_rng(plant.seed, kImbalanceStream);

  LockRunResult res;
  res.phase_error.dt_s = dt_s;
  res.phase_error.values.resize(n);
  res.transmittance.dt_s = dt_s;
  res.transmittance.values.resize(n);
  res.actuator.dt_s = dt_s;
  res.actuator.values.resize(n);
  res.unlocked = noise;

  const double half_range = stretcher.range_radians() / 2.0;
  const double act_alpha = 1.0 - std::exp(-2.0 * kPi * stretcher.bandwidth_hz * dt_s);

  // Slow common-mode power flicker: an OU process with a 2 s time constant
  // and stationary std = amplitude_flicker_rel.
  const double flicker_tau = 2.0;
  const double flicker_relax = dt_s / flicker_tau;
  const double flicker_step =
      readout.amplitude_flicker_rel * std::sqrt(2.0 * dt_s / flicker_tau);
  const double imbalance_step =
      readout.sensor_imbalance_rw_per_sqrt_s * std::sqrt(dt_s);

  double u = 0.0;        // controller output (commanded stretcher phase)
  double act = 0.0;      // actuator phase after its low pass
  double e1 = 0.0, e2 = 0.0;
  double flicker = 0.0;
  double imbalance = 0.0;
  bool saturated_prev = false;
  constexpr std::size_t kMaxEvents = 1000;

  for (std::size_t k = 0; k < n; ++k) {
    const double phi = kLockSetpointRad + noise.values[k] - act;

    if (flicker_step > 0.0)
      flicker += -flicker * flicker_relax + flicker_rng.normal(0.0, flicker_step);
    if (imbalance_step > 0.0)
      imbalance += imbalance_rng.normal(0.0, imbalance_step);

    const auto [v1, v2] =
        photodiode_signals(phi, readout, readout_rng, 1.0 + flicker, imbalance);
    const double e = error_signal(v1, v2);

    // Velocity-form PID, derivative on the measurement. Positive error
    // lowers the commanded stretcher phase.
    const double du = gains.kp * (e - e1) + gains.ki * dt_s * e +
                      (gains.kd != 0.0 ? gains.kd * (e - 2.0 * e1 + e2) / dt_s : 0.0);
    const double u_raw = u - du;
    u = std::clamp(u_raw, -half_range, half_range);
    const bool saturated = (u != u_raw);
    if (saturated && !saturated_prev && res.saturation_events.size() < kMaxEvents)
      res.saturation_events.push_back({dt_s * static_cast<double>(k), u_raw});
    saturated_prev = saturated;

    act += act_alpha * (u - act);
    e2 = e1;
    e1 = e;

    const double pe = phi - kLockSetpointRad;
    res.phase_error.values[k] = pe;
    res.transmittance.values[k] =
        optics::transmittance(phi + coupler.bias_phase, coupler).transmit;
    res.actuator.values[k] = act;
  }
  return res;
}

double measure_closed_loop_bandwidth(const ReferenceReadout& readout,
                                     const StretcherModel& stretcher,
                                     const PidGains& gains, double dt_s,
                                     std::uint64_t seed) {
  PhaseNoiseConfig calib;
  calib.drift_rw_deg_per_sqrt_s = 10.0;
  calib.seed = seed;

  ReferenceReadout clean = readout;
  clean.amplitude_flicker_rel = 0.0;
  clean.sensor_imbalance_rw_per_sqrt_s = 0.0;

  optics::CouplerModel coupler;
  const double duration = 30.0;
  const LockRunResult run =
      run_closed_loop(calib, clean, stretcher, gains, coupler, duration, dt_s);

  const std::size_t seg = 1u << 15;
  const Spectrum closed = noise_spectrum(run.phase_error, seg);
  const Spectrum open = noise_spectrum(run.unlocked, seg);

  // The paired ratio closed/open is |S(f)|^2; find the -3 dB crossing.
  double prev_f = 0.0, prev_r = 0.0;
  for (std::size_t i = 1; i < closed.frequency_hz.size(); ++i) {
    const double f = closed.frequency_hz[i];
    if (open.density[i] <= 0.0) continue;
    const double r = closed.density[i] / open.density[i];
    if (f > 1.0 && r >= 0.5 && prev_r > 0.0 && prev_r < 0.5) {
      const double x = (0.5 - prev_r) / (r - prev_r);
      return prev_f + x * (f - prev_f);
    }
    prev_f = f;
    prev_r = r;
  }
  throw NoEdgeFound("closed-loop rejection never crossed -3 dB");
}

PidGains tune_integral_gain(const ReferenceReadout& readout,
                            const StretcherModel& stretcher, PidGains start,
                            double dt_s, int max_iterations) {
  PidGains g = start;
  for (int it = 0; it < max_iterations; ++it) {
    const double bw = measure_closed_loop_bandwidth(readout, stretcher, g, dt_s);
    const double err = bw / g.loop_bandwidth_hz;
    if (err > 0.95 && err < 1.05) return g;
    g.ki /= err;
  }
  return g;
}

double phase_to_path_nm(double phase_deg, double wavelength_nm) {
  if (wavelength_nm <= 0.0) throw ConfigInvalid("wavelength must be positive");
  return phase_deg / 360.0 * wavelength_nm;
}

PhaseNoiseConfig default_desk_noise() {
  PhaseNoiseConfig cfg;
  cfg.drift_rw_deg_per_sqrt_s = 6.0;
  cfg.acoustic_lines = {{7.0, 1.0, 0.0}, {50.0, 0.2, 1.0}};
  cfg.seed = 20240809;
  return cfg;
}

ReferenceReadout default_readout() {
  ReferenceReadout r;
  r.amplitude_flicker_rel = 0.05;
  r.sensor_imbalance_rw_per_sqrt_s = 5e-5;
  return r;
}

}  // namespace mzsim::lock
