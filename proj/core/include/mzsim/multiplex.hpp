#pragma once

#include <cstdint>
#include <vector>

#include "mzsim/counting.hpp"
#include "mzsim/coupler.hpp"
#include "mzsim/rng.hpp"
#include "mzsim/timeseries.hpp"

namespace mzsim::mux {

// Delay-loop parameters. cycle_transmission is the fraction of circulating
// energy surviving one full circulation (coupler pass included); the
// release at pass k happens before the loss of the upcoming cycle.
// min_release is the smallest realizable release fraction, tied by default
// to the coupler extinction floor (1 - V)/2.
struct LoopConfig {
  double cycle_transmission = 0.2;
  double loop_delay_ns = 60.0;
  double min_release = (1.0 - 0.9955) / 2.0;

  bool valid() const {
    return cycle_transmission > 0.0 && cycle_transmission <= 1.0 &&
           min_release >= 0.0 && min_release < 0.5 && loop_delay_ns > 0.0;
  }
};

// Per-pass release fractions r_1..r_N. feasible records whether every
// release sits inside [min_release, 1 - min_release] or equals 1 exactly.
struct RatioSchedule {
  std::vector<double> releases;
  bool feasible = true;

  std::size_t bins() const { return releases.size(); }
};

// Energy bookkeeping of a schedule: fraction emitted per bin, fraction
// still circulating after the last pass, fraction lost in the loop.
struct BinDistribution {
  std::vector<double> probabilities;
  double survival = 0.0;
  double loss = 0.0;

  double emitted_total() const {
    double s = 0.0;
    for (double p : probabilities) s += p;
    return s;
  }
};

struct MaxBinsResult {
  std::size_t bins = 0;
  bool unbounded_at_ideal = false;  // eta = 1 with a zero release floor
};

// Exact forward recursion: a_1 = 1, emitted_k = a_k r_k,
// a_{k+1} = a_k (1 - r_k) eta.
BinDistribution forward_simulate(const RatioSchedule& schedule,
                                 const LoopConfig& loop);

// The unique schedule emitting equal energy in every bin: r_N = 1 and
// backwards r_k = eta r_{k+1} / (1 + eta r_{k+1}). Throws
// InfeasibleSchedule when a release falls below the floor.
RatioSchedule balanced_schedule(std::size_t n_bins, const LoopConfig& loop);

struct TargetScheduleResult {
  RatioSchedule schedule;
  double achieved_scale = 0.0;  // emitted fraction of the input energy
};

// Largest-scale schedule realizing bin proportions q (invariant under
// scaling of q). The binding pass releases everything; later don't-care
// passes are set to 1. Throws InfeasibleSchedule when a required release
// violates the feasibility band, DegenerateDistribution when q sums to 0.
TargetScheduleResult schedule_for_target(const std::vector<double>& target,
                                         const LoopConfig& loop);

// Largest N for which balanced_schedule stays feasible, capped at
// search_cap. With eta = 1 and a zero floor the count is unbounded and the
// cap is returned with the flag set.
MaxBinsResult max_balanced_bins(const LoopConfig& loop,
                                std::size_t search_cap = 64);

// Classical Bhattacharyya fidelity (sum_k sqrt(p q))^2 on internally
// normalized distributions. Throws DegenerateDistribution on a zero sum.
double distribution_fidelity(const std::vector<double>& p,
                             const std::vector<double>& q);

// Monte Carlo pulse train through the loop: Poisson photon number per
// input pulse, per-photon release/survival sampling along the forward
// recursion, then the SPAD click pipeline. Returns the click histogram
// keyed by time bin.
Histogram simulate_pulse_train(const RatioSchedule& schedule, const LoopConfig& loop,
                               const optics::CouplerModel& coupler,
                               const counting::SpadModel& spad,
                               std::uint64_t n_input_pulses, double mean_photons,
                               RngStream& rng);

}  // namespace mzsim::mux
