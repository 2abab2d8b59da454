#include "mzsim/switching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "mzsim/errors.hpp"

namespace mzsim::switching {

namespace {

constexpr double kPi = std::numbers::pi;

// Standard normal CDF.
double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double edge_level(double t_ns, double t_edge_ns, double sigma_ns) {
  if (sigma_ns <= 0.0) return t_ns >= t_edge_ns ? 1.0 : 0.0;
  return norm_cdf((t_ns - t_edge_ns) / sigma_ns);
}

}  // namespace

double quantize_amplitude(double amplitude, double full_scale, int bits,
                          double step_db) {
  if (amplitude == 0.0 || full_scale <= 0.0) return amplitude;
  const double target = std::abs(amplitude);
  const int levels = 1 << bits;
  double best = full_scale;
  double best_err = std::abs(full_scale - target);
  for (int k = 1; k < levels; ++k) {
    const double a = full_scale * std::pow(10.0, -k * step_db / 20.0);
    const double err = std::abs(a - target);
    if (err < best_err) {
      best = a;
      best_err = err;
    }
  }
  return std::copysign(best, amplitude);
}

TimeSeries phase_trajectory(const ControlPulse& pulse, const ResponseChain& chain,
                            const optics::CouplerModel& coupler, double dt_ns,
                            double t_end_ns) {
  if (!pulse.valid()) throw ConfigInvalid("control pulse invalid");
  if (!chain.valid()) throw ConfigInvalid("response chain invalid");
  if (dt_ns <= 0.0 || dt_ns > 0.01)
    throw ConfigInvalid("dt_ns must be in (0, 0.01] to resolve the EOM dynamics");

  double amplitude = pulse.v_end - pulse.v_start;
  if (pulse.quantize) {
    amplitude = quantize_amplitude(amplitude,
                                   coupler.drive_max_v - coupler.drive_min_v,
                                   pulse.quantization_bits,
                                   pulse.quantization_step_db);
  }
  // Validate the drive endpoints once; the erf edge stays inside them.
  (void)optics::voltage_for_phase(
      optics::phase_for_voltage(pulse.v_start, coupler), coupler);
  (void)optics::voltage_for_phase(
      optics::phase_for_voltage(pulse.v_start + amplitude, coupler), coupler);

  const double sigma = pulse.edge_rise_ns / kErfRise1090;
  const double margin = std::max(5.0 * sigma, 1.0);
  double t_end = t_end_ns;
  if (t_end <= 0.0) {
    t_end = pulse.start_time_ns + margin;
    if (pulse.duration_ns < 1e6) t_end += pulse.duration_ns;
  }

  const std::size_t n = static_cast<std::size_t>(std::ceil(t_end / dt_ns)) + 1;
  TimeSeries out;
  out.dt_s = dt_ns * 1e-9;
  out.values.resize(n);

  const double alpha =
      std::isinf(chain.eom_bandwidth_ghz)
          ? 1.0
          : 1.0 - std::exp(-2.0 * kPi * chain.eom_bandwidth_ghz * dt_ns);

  double lp = optics::phase_for_voltage(pulse.v_start, coupler);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = dt_ns * static_cast<double>(k);
    const double level = edge_level(t, pulse.start_time_ns, sigma) -
                         edge_level(t, pulse.start_time_ns + pulse.duration_ns, sigma);
    const double v = pulse.v_start + amplitude * level;
    const double target = optics::phase_for_voltage(v, coupler);
    lp += alpha * (target - lp);
    out.values[k] = lp;
  }
  return out;
}

TimeSeries transmittance_trajectory(const TimeSeries& phase_traj,
                                    const optics::CouplerModel& coupler) {
  TimeSeries out;
  out.dt_s = phase_traj.dt_s;
  out.values.reserve(phase_traj.size());
  for (double phi : phase_traj.values)
    out.values.push_back(optics::transmittance(phi, coupler).transmit);
  return out;
}

PortHistograms detection_histogram(const TimeSeries& transmit_traj,
                                   const ResponseChain& chain,
                                   std::uint64_t n_events, RngStream& rng) {
  if (!chain.valid()) throw ConfigInvalid("response chain invalid");
  if (transmit_traj.size() < 2) throw SeriesTooShort("trajectory needs >= 2 samples");

  const double dt_ns = transmit_traj.dt_s * 1e9;
  const double window_ns = dt_ns * static_cast<double>(transmit_traj.size() - 1);
  const double sigma_j = chain.spad_jitter_ns / kFwhm;

  // Pad the record so jittered events stay inside; extreme outliers are
  // clamped to keep port totals exactly at n_events.
  const double pad = 5.0 * sigma_j;
  const double t0 = -pad;
  const double t1 = window_ns + pad;
  const std::size_t nbins = static_cast<std::size_t>(
      std::ceil((t1 - t0) / chain.tagger_resolution_ns));

  Histogram h1{t0, chain.tagger_resolution_ns, std::vector<double>(nbins, 0.0)};
  Histogram h2 = h1;

  for (std::uint64_t e = 0; e < n_events; ++e) {
    const double arrival = rng.uniform(0.0, window_ns);
    const double x = arrival / dt_ns;
    const std::size_t i = std::min(static_cast<std::size_t>(x),
                                   transmit_traj.size() - 2);
    const double frac = x - static_cast<double>(i);
    const double t_here = transmit_traj.values[i] * (1.0 - frac) +
                          transmit_traj.values[i + 1] * frac;
    const bool to_port1 = rng.bernoulli(t_here);
    double recorded = arrival + rng.normal(0.0, sigma_j);
    recorded = std::clamp(recorded, t0, t1 - 1e-9);
    Histogram& h = to_port1 ? h1 : h2;
    const long long bin = h.bin_index(recorded);
    h.counts[static_cast<std::size_t>(std::max(0LL, bin))] += 1.0;
  }
  return {std::move(h1), std::move(h2)};
}

double rise_time_10_90_ns(const std::vector<double>& values, double x0_ns,
                          double dx_ns, double plateau_frac) {
  const std::size_t n = values.size();
  if (n < 5) throw NoEdgeFound("record too short for plateau estimation");
  const std::size_t npl = std::max<std::size_t>(1, static_cast<std::size_t>(
                                                       plateau_frac * static_cast<double>(n)));
  auto median_of = [](std::vector<double> v) {
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    return v[v.size() / 2];
  };
  const double lo = median_of({values.begin(), values.begin() + npl});
  const double hi = median_of({values.end() - npl, values.end()});
  const double span = hi - lo;
  double scale = 0.0;
  for (double v : values) scale = std::max(scale, std::abs(v));
  if (std::abs(span) <= 1e-9 * std::max(scale, 1.0))
    throw NoEdgeFound("no plateau-to-plateau edge present");

  // Work on a rising edge; mirror falling ones.
  const bool rising = span > 0.0;
  const double l10 = lo + 0.1 * span;
  const double l90 = lo + 0.9 * span;
  auto above = [&](double v, double level) { return rising ? v >= level : v <= level; };

  std::size_t i90 = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (above(values[i], l90)) {
      i90 = i;
      break;
    }
  }
  if (i90 == n || i90 == 0) throw NoEdgeFound("edge never reaches the 90% level");

  std::size_t i10 = 0;
  bool found10 = false;
  for (std::size_t i = i90; i-- > 0;) {
    if (!above(values[i], l10)) {
      i10 = i;
      found10 = true;
      break;
    }
  }
  if (!found10) throw NoEdgeFound("edge never leaves the 10% level");

  auto cross = [&](std::size_t below_idx, double level) {
    const double a = values[below_idx];
    const double b = values[below_idx + 1];
    const double f = (b == a) ? 0.5 : (level - a) / (b - a);
    return x0_ns + dx_ns * (static_cast<double>(below_idx) + f);
  };
  const double t10 = cross(i10, l10);
  const double t90 = cross(i90 - 1, l90);
  return t90 - t10;
}

double rise_time_10_90_ns(const TimeSeries& series, double plateau_frac) {
  return rise_time_10_90_ns(series.values, 0.0, series.dt_s * 1e9, plateau_frac);
}

double rise_time_10_90_ns(const Histogram& hist, double plateau_frac) {
  return rise_time_10_90_ns(hist.counts, hist.bin_center_ns(0),
                            hist.bin_width_ns, plateau_frac);
}

double quadrature_compose(const std::vector<double>& components_ns) {
  double s = 0.0;
  for (double c : components_ns) {
    if (c < 0.0) throw ConfigInvalid("quadrature components must be >= 0");
    s += c * c;
  }
  return std::sqrt(s);
}

double quadrature_extract(double total_ns, const std::vector<double>& knowns_ns) {
  double s = total_ns * total_ns;
  for (double c : knowns_ns) {
    if (c < 0.0) throw ConfigInvalid("quadrature components must be >= 0");
    s -= c * c;
  }
  const double slack = 1e-12 * std::max(1.0, total_ns * total_ns);
  if (s < -slack) {
    std::ostringstream msg;
    msg << "known contributions exceed the total width " << total_ns
        << " ns; the quadrature model cannot explain the measurement";
    throw InconsistentBudget(msg.str());
  }
  return std::sqrt(std::max(0.0, s));
}

double first_order_rise_ns(double bandwidth_ghz) {
  return std::log(9.0) / (2.0 * kPi * bandwidth_ghz);
}

}  // namespace mzsim::switching
