#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace mecrl {

// 64-bit finalizer from SplitMix64.
std::uint64_t splitmix64(std::uint64_t x);

// Order-sensitive combination of two 64-bit values.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

// FNV-1a over the bytes of a purpose tag.
std::uint64_t tag_hash(std::string_view tag);

// A seeded random stream. Each stream is consumed by exactly one purpose so
// that changing how often one consumer draws never shifts another's draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  // Derive an independent stream for `tag` from a master seed.
  static Rng derive(std::uint64_t master, std::string_view tag) {
    return Rng(mix_seed(master, tag_hash(tag)));
  }

  double uniform(double lo, double hi);
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);  // inclusive
  double normal(double mean, double stddev);
  std::int64_t poisson(double mean);
  std::size_t index(std::size_t n);  // uniform in [0, n)

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mecrl
