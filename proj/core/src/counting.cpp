#include "mzsim/counting.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <queue>
#include <sstream>

#include "mzsim/errors.hpp"
#include "mzsim/switching.hpp"

namespace mzsim::counting {

double DelayProfile::sample(RngStream& rng) const {
  // Inverse-CDF draw from the truncated exponential.
  const double cap = 1.0 - std::exp(-truncation_ns / mean_ns);
  const double u = rng.uniform(0.0, cap);
  return -mean_ns * std::log(1.0 - u);
}

std::vector<double> DelayProfile::bin_weights(double bin_width_ns,
                                              std::size_t n_bins) const {
  std::vector<double> w(n_bins, 0.0);
  const double cap = 1.0 - std::exp(-truncation_ns / mean_ns);
  for (std::size_t k = 0; k < n_bins; ++k) {
    const double a = bin_width_ns * static_cast<double>(k);
    const double b = std::min(bin_width_ns * static_cast<double>(k + 1), truncation_ns);
    if (a >= truncation_ns) break;
    w[k] = (std::exp(-a / mean_ns) - std::exp(-b / mean_ns)) / cap;
  }
  return w;
}

std::vector<double> ResponseMatrix::column(std::size_t n) const {
  std::vector<double> col(n_bins + 1);
  for (std::size_t m = 0; m <= n_bins; ++m) col[m] = at(m, n);
  return col;
}

double equal_bin_click_probability(std::size_t n_bins, std::size_t m,
                                   std::size_t n, double per_photon_efficiency) {
  if (m > n_bins || m > n) return 0.0;
  const double nb = static_cast<double>(n_bins);
  auto binom = [](std::size_t a, std::size_t b) {
    double r = 1.0;
    for (std::size_t i = 0; i < b; ++i)
      r = r * static_cast<double>(a - i) / static_cast<double>(i + 1);
    return r;
  };
  double sum = 0.0;
  for (std::size_t j = 0; j <= m; ++j) {
    const double occupied = static_cast<double>(m - j) / nb * per_photon_efficiency;
    const double base = occupied + (1.0 - per_photon_efficiency);
    const double term = binom(m, j) * std::pow(base, static_cast<double>(n));
    sum += (j % 2 == 0) ? term : -term;
  }
  return binom(n_bins, m) * sum;
}

ResponseMatrix pnr_response(const std::vector<double>& bin_probs,
                            double per_photon_efficiency, std::size_t n_max,
                            std::size_t max_bins_limit) {
  const std::size_t nb = bin_probs.size();
  if (nb == 0) throw ConfigInvalid("pnr_response needs at least one bin");
  if (nb > max_bins_limit) {
    std::ostringstream msg;
    msg << nb << " bins exceed the inclusion-exclusion limit of " << max_bins_limit;
    throw TooManyBins(msg.str());
  }
  double total = 0.0;
  for (double q : bin_probs) {
    if (q < 0.0) throw ConfigInvalid("bin probabilities must be >= 0");
    total += q;
  }
  if (per_photon_efficiency < 0.0 || total * per_photon_efficiency > 1.0 + 1e-12)
    throw ConfigInvalid("per-photon bin probabilities exceed 1");

  ResponseMatrix rm;
  rm.n_bins = nb;
  rm.n_max = n_max;
  rm.bin_probabilities = bin_probs;
  rm.p.assign((nb + 1) * (n_max + 1), 0.0);

  bool equal = true;
  for (double q : bin_probs)
    if (std::abs(q - bin_probs[0]) > 1e-15) equal = false;

  if (equal) {
    for (std::size_t n = 0; n <= n_max; ++n)
      for (std::size_t m = 0; m <= std::min(nb, n); ++m)
        rm.at(m, n) = equal_bin_click_probability(
            nb, m, n, per_photon_efficiency * bin_probs[0] * static_cast<double>(nb));
    return rm;
  }

  // General case. For a subset T of bins let F_n(T) = P(all n photons land
  // in T or are lost) = (q(T) + loss)^n. The probability that the fired set
  // is exactly S is the Moebius inversion of F over the subset lattice,
  // computed with an in-place subset-sum transform.
  const std::size_t full = 1ull << nb;
  std::vector<double> qsum(full, 0.0);
  for (std::size_t mask = 1; mask < full; ++mask) {
    const std::size_t low = mask & (~mask + 1);
    const std::size_t bit = static_cast<std::size_t>(std::countr_zero(low));
    qsum[mask] = qsum[mask ^ low] + bin_probs[bit] * per_photon_efficiency;
  }
  const double loss = 1.0 - qsum[full - 1];

  std::vector<double> f(full);
  std::vector<std::size_t> popcounts(full);
  for (std::size_t mask = 0; mask < full; ++mask)
    popcounts[mask] = static_cast<std::size_t>(std::popcount(mask));

  for (std::size_t n = 0; n <= n_max; ++n) {
    for (std::size_t mask = 0; mask < full; ++mask)
      f[mask] = std::pow(qsum[mask] + loss, static_cast<double>(n));
    // exact(S) = sum_{T subset S} (-1)^{|S|-|T|} F(T): alternate-sign
    // subset-sum transform, one bit at a time.
    for (std::size_t bit = 0; bit < nb; ++bit) {
      const std::size_t b = 1ull << bit;
      for (std::size_t mask = 0; mask < full; ++mask)
        if (mask & b) f[mask] -= f[mask ^ b];
    }
    for (std::size_t mask = 0; mask < full; ++mask) {
      const std::size_t m = popcounts[mask];
      if (m <= nb) rm.at(m, n) += std::max(0.0, f[mask]);
    }
  }
  return rm;
}

std::vector<ClickRecord> click_pipeline(const std::vector<TaggedPhoton>& photons,
                                        const SpadModel& spad, RngStream& rng,
                                        double window_t0_ns, double window_t1_ns,
                                        const DelayProfile& afterpulse_delay) {
  if (!spad.valid()) throw ConfigInvalid("spad model invalid");
  if (!afterpulse_delay.valid()) throw ConfigInvalid("delay profile invalid");
  if (window_t1_ns < window_t0_ns) throw ConfigInvalid("empty click window");

  struct Avalanche {
    double time_ns;
    int detector_id;
    ClickOrigin origin;
    bool operator>(const Avalanche& o) const { return time_ns > o.time_ns; }
  };
  std::priority_queue<Avalanche, std::vector<Avalanche>, std::greater<>> queue;

  for (const auto& ph : photons) {
    if (rng.bernoulli(spad.efficiency))
      queue.push({ph.time_ns, ph.detector_id, ClickOrigin::kPhoton});
  }

  // Dark counts: a Poisson process per detector over the record window.
  int max_det = 0;
  for (const auto& ph : photons) max_det = std::max(max_det, ph.detector_id);
  if (spad.dark_rate_hz > 0.0) {
    const double window_s = (window_t1_ns - window_t0_ns) * 1e-9;
    for (int det = 0; det <= max_det; ++det) {
      const std::uint64_t n_dark = rng.poisson(spad.dark_rate_hz * window_s);
      for (std::uint64_t i = 0; i < n_dark; ++i)
        queue.push({rng.uniform(window_t0_ns, window_t1_ns), det, ClickOrigin::kDark});
    }
  }

  const double sigma_j = spad.jitter_ns / switching::kFwhm;
  std::vector<double> last_click(static_cast<std::size_t>(max_det) + 1,
                                 -std::numeric_limits<double>::infinity());
  std::vector<ClickRecord> clicks;

  while (!queue.empty()) {
    const Avalanche av = queue.top();
    queue.pop();
    const std::size_t det = static_cast<std::size_t>(av.detector_id);
    if (det >= last_click.size())
      last_click.resize(det + 1, -std::numeric_limits<double>::infinity());
    if (av.time_ns - last_click[det] < spad.dead_time_ns) continue;
    last_click[det] = av.time_ns;

    double recorded = av.time_ns;
    if (sigma_j > 0.0) recorded += rng.normal(0.0, sigma_j);
    clicks.push_back({av.detector_id, recorded, av.origin});

    if (rng.bernoulli(spad.afterpulse_prob)) {
      const double delay = afterpulse_delay.sample(rng);
      queue.push({av.time_ns + delay, av.detector_id, ClickOrigin::kAfterpulse});
    }
  }

  std::sort(clicks.begin(), clicks.end(), [](const auto& a, const auto& b) {
    if (a.detector_id != b.detector_id) return a.detector_id < b.detector_id;
    return a.time_ns < b.time_ns;
  });
  return clicks;
}

CorrectedHistogram afterpulse_correct(const Histogram& hist, double afterpulse_prob,
                                      const DelayProfile& delay) {
  if (afterpulse_prob < 0.0 || afterpulse_prob > 0.1)
    throw ConfigInvalid("afterpulse probability out of the [0, 0.1] sanity range");
  if (!delay.valid()) throw ConfigInvalid("delay profile invalid");

  CorrectedHistogram out;
  out.corrected = hist;
  out.subtracted = hist;
  std::fill(out.subtracted.counts.begin(), out.subtracted.counts.end(), 0.0);
  if (afterpulse_prob == 0.0 || hist.counts.empty()) return out;

  const std::vector<double> weights =
      delay.bin_weights(hist.bin_width_ns, hist.counts.size());

  // Every recorded count (real or spurious) spawns afterpulses with the
  // same probability, so the expectation is driven by the raw counts.
  for (std::size_t i = 0; i < hist.counts.size(); ++i) {
    const double parents = hist.counts[i];
    if (parents <= 0.0) continue;
    for (std::size_t k = 0; k < weights.size() && i + k < hist.counts.size(); ++k) {
      const double expected = parents * afterpulse_prob * weights[k];
      out.subtracted.counts[i + k] += expected;
    }
  }
  for (std::size_t i = 0; i < hist.counts.size(); ++i)
    out.corrected.counts[i] = std::max(0.0, hist.counts[i] - out.subtracted.counts[i]);
  return out;
}

}  // namespace mzsim::counting
