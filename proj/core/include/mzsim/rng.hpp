#pragma once

#include <cstdint>
#include <random>

namespace mzsim {

// SplitMix64 step, used to expand a master seed into independent
// per-run stream seeds. See https://prng.di.unimi.it.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Seed for stream `stream_index` derived from `master_seed`. Streams for
// distinct indices are statistically independent, so parameter scans and
// seed ensembles can run concurrently while staying reproducible.
inline std::uint64_t derive_stream_seed(std::uint64_t master_seed,
                                        std::uint64_t stream_index) {
  std::uint64_t s = master_seed;
  std::uint64_t a = splitmix64(s);
  s = a ^ (stream_index * 0xbf58476d1ce4e5b9ull + 0x94d049bb133111ebull);
  return splitmix64(s);
}

// A seeded random stream owned by exactly one simulation run.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
      : engine_(derive_stream_seed(master_seed, stream_index)) {}

  double normal(double mean = 0.0, double stddev = 1.0) {
    std::normal_distribution<double> d(mean, stddev);
    return d(engine_);
  }

  double uniform(double lo = 0.0, double hi = 1.0) {
    std::uniform_real_distribution<double> d(lo, hi);
    return d(engine_);
  }

  std::uint64_t poisson(double mean) {
    std::poisson_distribution<std::uint64_t> d(mean);
    return d(engine_);
  }

  double exponential(double mean) {
    std::exponential_distribution<double> d(1.0 / mean);
    return d(engine_);
  }

  bool bernoulli(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return uniform() < p;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mzsim
