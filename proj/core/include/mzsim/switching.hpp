#pragma once

#include <cstdint>
#include <vector>

#include "mzsim/coupler.hpp"
#include "mzsim/rng.hpp"
#include "mzsim/timeseries.hpp"

namespace mzsim::switching {

// Electrical control pulse: two error-function edges separated by
// duration_ns. The optional amplitude quantization reproduces a digital
// step attenuator in the drive chain; it is off by default so the analytic
// edge shapes stay exact.
struct ControlPulse {
  double v_start = 0.0;
  double v_end = 2.2;
  double edge_rise_ns = 0.4;  // 10-90% of the electrical edge
  double start_time_ns = 5.0;
  double duration_ns = 1e9;  // effectively a single edge by default
  bool quantize = false;
  double quantization_step_db = 0.5;
  int quantization_bits = 6;

  bool valid() const { return edge_rise_ns >= 0.0 && duration_ns > 0.0; }
};

// Everything between the pulse generator and the time tagger.
struct ResponseChain {
  double eom_bandwidth_ghz = 10.0;
  double spad_jitter_ns = 0.3;      // FWHM of the Gaussian timing blur
  double tagger_resolution_ns = 0.16;
  double control_rise_ns = 0.4;     // quoted electrical 10-90, for budgets

  bool valid() const {
    return eom_bandwidth_ghz > 0.0 && spad_jitter_ns > 0.0 &&
           tagger_resolution_ns > 0.0 && control_rise_ns > 0.0;
  }
};

struct PortHistograms {
  Histogram port1;  // transmit port
  Histogram port2;  // reflect port
};

// 10-90% width of a Gaussian edge in units of its sigma.
inline constexpr double kErfRise1090 = 2.5631031310892007;
// FWHM of a Gaussian in units of its sigma.
inline constexpr double kFwhm = 2.3548200450309493;

// Snap a pulse amplitude to the nearest level of a step attenuator with
// the given bit depth and dB step, relative to full_scale.
double quantize_amplitude(double amplitude, double full_scale, int bits,
                          double step_db);

// Phase trajectory of one control pulse: the electrical edge mapped
// through the linear drive-voltage relation, then a first-order low pass
// at the EOM bandwidth. Sampled at dt_ns from t = 0 to t_end_ns
// (default: pulse start + duration + settling margin, capped for the
// single-edge default). Throws DriveRangeExceeded if the pulse leaves the
// coupler drive window.
TimeSeries phase_trajectory(const ControlPulse& pulse, const ResponseChain& chain,
                            const optics::CouplerModel& coupler, double dt_ns,
                            double t_end_ns = -1.0);

// Map a phase trajectory to the coupler transmit fraction sample by sample.
TimeSeries transmittance_trajectory(const TimeSeries& phase_traj,
                                    const optics::CouplerModel& coupler);

// Photon-counting histograms of a switching event: arrivals uniform over
// the trajectory window, routed to port 1 with the instantaneous
// transmittance, blurred by the SPAD jitter and binned at the tagger
// resolution. Total counts over both ports equal n_events exactly.
PortHistograms detection_histogram(const TimeSeries& transmit_traj,
                                   const ResponseChain& chain,
                                   std::uint64_t n_events, RngStream& rng);

// 10-90% rise (or fall) time between the two plateaus of an edge, with
// linear interpolation between samples. Plateaus are medians of the first
// and last plateau_frac of the record. Throws NoEdgeFound when there is no
// usable edge.
double rise_time_10_90_ns(const std::vector<double>& values, double x0_ns,
                          double dx_ns, double plateau_frac = 0.2);
double rise_time_10_90_ns(const TimeSeries& series, double plateau_frac = 0.2);
double rise_time_10_90_ns(const Histogram& hist, double plateau_frac = 0.2);

// Gaussian-quadrature response budget: total = sqrt(sum of squares).
double quadrature_compose(const std::vector<double>& components_ns);

// Inverse budget: the unexplained component once knowns_ns are removed.
// Throws InconsistentBudget when the knowns exceed the total.
double quadrature_extract(double total_ns, const std::vector<double>& knowns_ns);

// 10-90% rise of a first-order system step response, ln(9)/(2 pi f).
double first_order_rise_ns(double bandwidth_ghz);

}  // namespace mzsim::switching
