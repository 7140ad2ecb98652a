#include "covsim/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace covsim {

std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

std::uint64_t Rng::next_u64() {
  state_ += 0x9E3779B97F4A7C15ULL;
  return mix64(state_);
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

bool Rng::bernoulli(double p) { return uniform() < p; }

double Rng::exponential(double rate) {
  return -std::log1p(-uniform()) / rate;
}

std::uint64_t Rng::poisson(double mean) {
  if (!(mean >= 0.0)) throw std::invalid_argument("poisson: mean must be >= 0");
  // Knuth multiplication in chunks of 500 so exp(-chunk) never underflows.
  std::uint64_t n = 0;
  while (mean > 0.0) {
    const double chunk = mean > 500.0 ? 500.0 : mean;
    mean -= chunk;
    const double limit = std::exp(-chunk);
    double prod = uniform();
    while (prod > limit) {
      ++n;
      prod *= uniform();
    }
  }
  return n;
}

Rng make_rng(Seed seed, std::uint64_t substream) {
  const std::uint64_t state =
      mix64(seed.root ^ mix64(seed.stream + 0x9E3779B97F4A7C15ULL) ^
            mix64(substream + 0xD1B54A32D192ED03ULL));
  return Rng(state);
}

}  // namespace covsim
