#include "mzsim/multiplex.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mzsim/errors.hpp"

namespace mzsim::mux {

namespace {

constexpr double kBandSlack = 1e-12;

bool in_feasible_band(double r, double min_release) {
  if (std::abs(r - 1.0) <= kBandSlack) return true;
  return r >= min_release - kBandSlack && r <= 1.0 - min_release + kBandSlack;
}

void validate(const LoopConfig& loop) {
  if (!loop.valid()) throw ConfigInvalid("loop config invalid");
}

}  // namespace

BinDistribution forward_simulate(const RatioSchedule& schedule,
                                 const LoopConfig& loop) {
  validate(loop);
  if (schedule.releases.empty())
    throw ConfigInvalid("forward_simulate needs a non-empty schedule");

  BinDistribution dist;
  dist.probabilities.reserve(schedule.releases.size());
  double circulating = 1.0;
  double lost = 0.0;
  for (double r : schedule.releases) {
    if (r < 0.0 || r > 1.0) throw ConfigInvalid("release fraction outside [0, 1]");
    const double emitted = circulating * r;
    dist.probabilities.push_back(emitted);
    const double kept = circulating * (1.0 - r);
    circulating = kept * loop.cycle_transmission;
    lost += kept * (1.0 - loop.cycle_transmission);
  }
  dist.survival = circulating;
  dist.loss = lost;
  return dist;
}

RatioSchedule balanced_schedule(std::size_t n_bins, const LoopConfig& loop) {
  validate(loop);
  if (n_bins == 0) throw ConfigInvalid("balanced_schedule needs n_bins >= 1");

  RatioSchedule schedule;
  schedule.releases.assign(n_bins, 1.0);
  const double eta = loop.cycle_transmission;
  for (std::size_t k = n_bins - 1; k-- > 0;) {
    const double next = schedule.releases[k + 1];
    schedule.releases[k] = eta * next / (1.0 + eta * next);
  }

  for (std::size_t k = 0; k < n_bins; ++k) {
    if (!in_feasible_band(schedule.releases[k], loop.min_release)) {
      schedule.feasible = false;
      std::ostringstream msg;
      msg << "balanced schedule for " << n_bins << " bins needs release "
          << schedule.releases[k] << " at pass " << (k + 1)
          << ", below the extinction floor " << loop.min_release;
      throw InfeasibleSchedule(msg.str());
    }
  }
  return schedule;
}

TargetScheduleResult schedule_for_target(const std::vector<double>& target,
                                         const LoopConfig& loop) {
  validate(loop);
  if (target.empty()) throw ConfigInvalid("target distribution is empty");
  double total = 0.0;
  for (double q : target) {
    if (q < 0.0) throw ConfigInvalid("target probabilities must be >= 0");
    total += q;
  }
  if (total <= 0.0) throw DegenerateDistribution("target distribution sums to zero");

  const std::size_t n = target.size();
  const double eta = loop.cycle_transmission;
  std::vector<double> q(n);
  for (std::size_t k = 0; k < n; ++k) q[k] = target[k] / total;

  // Largest feasible emitted fraction c: the release at pass k is
  // r_k = c q_k / a_k with a_k affine in c, and r <= 1 binds first at the
  // last bin with mass (the constraint ratios decrease along the train).
  double best_c = std::numeric_limits<double>::infinity();
  double eta_pow = 1.0;   // eta^{k-1}
  double weighted = 0.0;  // sum_{j<k} eta^{k-j} q_j, updated incrementally
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) {
      weighted = (weighted + q[k - 1]) * eta;
      eta_pow *= eta;
    }
    const double denom = q[k] + weighted;
    if (q[k] > 0.0 && denom > 0.0) best_c = std::min(best_c, eta_pow / denom);
  }

  TargetScheduleResult res;
  res.achieved_scale = best_c;
  res.schedule.releases.assign(n, 1.0);

  double circulating = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    double r;
    if (circulating <= 0.0) {
      r = 1.0;  // don't-care pass after the full dump
    } else {
      r = std::clamp(best_c * q[k] / circulating, 0.0, 1.0);
    }
    res.schedule.releases[k] = r;
    circulating = circulating * (1.0 - r) * eta;
    if (circulating < 1e-15) circulating = 0.0;
  }

  for (std::size_t k = 0; k < n; ++k) {
    if (!in_feasible_band(res.schedule.releases[k], loop.min_release)) {
      res.schedule.feasible = false;
      std::ostringstream msg;
      msg << "target needs release " << res.schedule.releases[k] << " at pass "
          << (k + 1) << ", outside the feasible band [" << loop.min_release
          << ", " << (1.0 - loop.min_release) << "] u {1}";
      throw InfeasibleSchedule(msg.str());
    }
  }
  return res;
}

MaxBinsResult max_balanced_bins(const LoopConfig& loop, std::size_t search_cap) {
  validate(loop);
  if (loop.cycle_transmission >= 1.0 && loop.min_release <= 0.0)
    return {search_cap, true};

  // r_1 of the balanced schedule is its smallest release; 1/r_1 obeys
  // s -> s/eta + 1 per added bin.
  std::size_t best = 1;
  double s = 1.0;
  for (std::size_t n = 2; n <= search_cap; ++n) {
    s = s / loop.cycle_transmission + 1.0;
    if (1.0 / s < loop.min_release - kBandSlack) return {best, false};
    best = n;
  }
  return {best, false};
}

double distribution_fidelity(const std::vector<double>& p,
                             const std::vector<double>& q) {
  const std::size_t n = std::max(p.size(), q.size());
  double sp = 0.0, sq = 0.0;
  for (double x : p) {
    if (x < 0.0) throw ConfigInvalid("probabilities must be >= 0");
    sp += x;
  }
  for (double x : q) {
    if (x < 0.0) throw ConfigInvalid("probabilities must be >= 0");
    sq += x;
  }
  if (sp <= 0.0 || sq <= 0.0)
    throw DegenerateDistribution("cannot normalize a zero distribution");

  double bc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double pk = k < p.size() ? p[k] / sp : 0.0;
    const double qk = k < q.size() ? q[k] / sq : 0.0;
    bc += std::sqrt(pk * qk);
  }
  return bc * bc;
}

Histogram simulate_pulse_train(const RatioSchedule& schedule, const LoopConfig& loop,
                               const optics::CouplerModel& coupler,
                               const counting::SpadModel& spad,
                               std::uint64_t n_input_pulses, double mean_photons,
                               RngStream& rng) {
  validate(loop);
  if (!coupler.valid()) throw ConfigInvalid("coupler model invalid");
  if (schedule.releases.empty()) throw ConfigInvalid("schedule is empty");
  if (mean_photons < 0.0) throw ConfigInvalid("mean photon number must be >= 0");

  const std::size_t n_bins = schedule.releases.size();
  const double delay = loop.loop_delay_ns;
  // One pulse period: all bins plus recovery headroom before the next train.
  const double period =
      static_cast<double>(n_bins) * delay + std::max(spad.dead_time_ns, delay) + 40.0;
  const double exit_survival = coupler.loss_factor();

  std::vector<counting::TaggedPhoton> photons;
  photons.reserve(static_cast<std::size_t>(
      static_cast<double>(n_input_pulses) * mean_photons * 0.1) + 16);

  for (std::uint64_t pulse = 0; pulse < n_input_pulses; ++pulse) {
    const double t_pulse = static_cast<double>(pulse) * period;
    const std::uint64_t n_photons = mean_photons > 0.0 ? rng.poisson(mean_photons) : 0;
    for (std::uint64_t ph = 0; ph < n_photons; ++ph) {
      for (std::size_t k = 0; k < n_bins; ++k) {
        if (rng.bernoulli(schedule.releases[k])) {
          if (rng.bernoulli(exit_survival))
            photons.push_back({0, t_pulse + static_cast<double>(k) * delay});
          break;
        }
        if (!rng.bernoulli(loop.cycle_transmission)) break;  // lost in the loop
      }
    }
  }
  std::sort(photons.begin(), photons.end(),
            [](const auto& a, const auto& b) { return a.time_ns < b.time_ns; });

  const double window_end = static_cast<double>(n_input_pulses) * period;
  const auto clicks =
      counting::click_pipeline(photons, spad, rng, 0.0, window_end);

  Histogram hist{0.0, delay, std::vector<double>(n_bins, 0.0)};
  for (const auto& click : clicks) {
    // Shift by half a bin so jitter across a pulse boundary still folds
    // into bin 0 of its own pulse.
    const double rel = std::fmod(click.time_ns + delay / 2.0, period) - delay / 2.0;
    const long long k = std::llround(rel / delay);
    if (k < 0 || k >= static_cast<long long>(n_bins)) continue;
    if (std::abs(rel - static_cast<double>(k) * delay) <= delay / 2.0)
      hist.counts[static_cast<std::size_t>(k)] += 1.0;
  }
  return hist;
}

}  // namespace mzsim::mux
