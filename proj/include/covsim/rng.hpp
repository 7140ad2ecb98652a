#pragma once

#include <cstdint>

namespace covsim {

// Root/stream pair that fully determines every random draw. Parallel workers
// derive independent generators via make_rng(seed, trial_index); no generator
// state is ever shared between threads.
struct Seed {
  std::uint64_t root = 0;
  std::uint64_t stream = 0;
};

std::uint64_t mix64(std::uint64_t z);

// Sequential splitmix64 generator. All distributions are implemented on top of
// next_u64() so that results are bit-identical across platforms (the standard
// <random> distributions are not).
class Rng {
 public:
  explicit Rng(std::uint64_t state) : state_(state) {}

  std::uint64_t next_u64();

  // Uniform in [0, 1), 53-bit resolution.
  double uniform();
  double uniform(double lo, double hi);
  bool bernoulli(double p);
  double exponential(double rate);
  std::uint64_t poisson(double mean);

 private:
  std::uint64_t state_;
};

// Generator keyed by (seed.root, seed.stream, substream).
Rng make_rng(Seed seed, std::uint64_t substream = 0);

}  // namespace covsim
