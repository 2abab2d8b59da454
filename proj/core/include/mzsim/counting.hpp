#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mzsim/rng.hpp"
#include "mzsim/timeseries.hpp"

namespace mzsim::counting {

// Click detector imperfections. Dead time default sits mid-range of
// typical free-running SPAD recovery (10-30 ns).
struct SpadModel {
  double efficiency = 1.0;
  double jitter_ns = 0.3;  // FWHM
  double dead_time_ns = 25.0;
  double afterpulse_prob = 0.01;
  double dark_rate_hz = 0.0;

  bool valid() const {
    return efficiency >= 0.0 && efficiency <= 1.0 && jitter_ns >= 0.0 &&
           dead_time_ns >= 0.0 && afterpulse_prob >= 0.0 &&
           afterpulse_prob < 0.1 && dark_rate_hz >= 0.0;
  }
};

// Afterpulse delay distribution: exponential with the given mean,
// truncated at truncation_ns.
struct DelayProfile {
  double mean_ns = 50.0;
  double truncation_ns = 1000.0;

  bool valid() const { return mean_ns > 0.0 && truncation_ns >= mean_ns; }

  double sample(RngStream& rng) const;

  // Probability mass of the delay landing in [k*bin, (k+1)*bin) for
  // k = 0..n_bins-1, conditioned on the truncation.
  std::vector<double> bin_weights(double bin_width_ns, std::size_t n_bins) const;
};

enum class ClickOrigin { kPhoton, kAfterpulse, kDark };

inline const char* to_string(ClickOrigin o) {
  switch (o) {
    case ClickOrigin::kPhoton: return "photon";
    case ClickOrigin::kAfterpulse: return "afterpulse";
    case ClickOrigin::kDark: return "dark";
  }
  return "unknown";
}

struct ClickRecord {
  int detector_id = 0;
  double time_ns = 0.0;
  ClickOrigin origin = ClickOrigin::kPhoton;
};

struct TaggedPhoton {
  int detector_id = 0;
  double time_ns = 0.0;
};

// P(m clicks | n photons) for a time-multiplexed click detector.
struct ResponseMatrix {
  std::size_t n_bins = 0;
  std::size_t n_max = 0;
  std::vector<double> bin_probabilities;
  // Row-major: p[m * (n_max+1) + n].
  std::vector<double> p;

  double at(std::size_t m, std::size_t n) const { return p[m * (n_max + 1) + n]; }
  double& at(std::size_t m, std::size_t n) { return p[m * (n_max + 1) + n]; }
  std::vector<double> column(std::size_t n) const;
};

// Exact click-number response by inclusion-exclusion over bin subsets
// (subset-sum transform, O(N 2^N)). Each photon lands in bin k with
// probability per_photon_efficiency * bin_probs[k] and is lost otherwise;
// P(m|n) is the probability that exactly m distinct bins fire. An equal-bin
// fast path avoids the transform when all bin probabilities match.
// Throws TooManyBins above max_bins_limit.
ResponseMatrix pnr_response(const std::vector<double>& bin_probs,
                            double per_photon_efficiency, std::size_t n_max,
                            std::size_t max_bins_limit = 20);

// Equal-bin closed form, kept separate as an algebraic cross-check of the
// general path.
double equal_bin_click_probability(std::size_t n_bins, std::size_t m,
                                   std::size_t n, double per_photon_efficiency);

// Full click pipeline: efficiency thinning, Gaussian timing jitter,
// per-detector dead-time veto, afterpulse cascade, Poisson dark counts over
// [window_t0_ns, window_t1_ns]. Photons must be sorted in time per
// detector. Returned records are sorted by (detector, time).
std::vector<ClickRecord> click_pipeline(const std::vector<TaggedPhoton>& photons,
                                        const SpadModel& spad, RngStream& rng,
                                        double window_t0_ns, double window_t1_ns,
                                        const DelayProfile& afterpulse_delay = {});

struct CorrectedHistogram {
  Histogram corrected;
  Histogram subtracted;  // expected afterpulse counts removed per bin
};

// Expected-value afterpulse subtraction: each recorded count may have
// spawned afterpulses into later bins according to the delay profile;
// remove that expectation bin by bin (clamping at zero).
CorrectedHistogram afterpulse_correct(const Histogram& hist, double afterpulse_prob,
                                      const DelayProfile& delay = {});

}  // namespace mzsim::counting
