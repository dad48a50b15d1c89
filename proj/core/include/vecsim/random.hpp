#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace vecsim {

// Seeded generator with distribution code written out by hand: the standard
// distributions are implementation defined, and scenarios must be
// bit-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Seeds from several integers through std::seed_seq, whose mixing is
  // fully specified by the standard.
  Rng(std::initializer_list<std::uint64_t> words) {
    std::vector<std::uint32_t> halves;
    halves.reserve(words.size() * 2);
    for (auto w : words) {
      halves.push_back(static_cast<std::uint32_t>(w & 0xffffffffu));
      halves.push_back(static_cast<std::uint32_t>(w >> 32));
    }
    std::seed_seq seq(halves.begin(), halves.end());
    engine_.seed(seq);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Exponential with the given rate (mean 1/rate).
  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

  // Uniform index in [0, n).
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
  }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

// Folds two seeds into one; used to derive per-run optimizer seeds.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
  Rng rng{base, salt, 0x76656373696dULL};
  return rng.next();
}

}  // namespace vecsim
