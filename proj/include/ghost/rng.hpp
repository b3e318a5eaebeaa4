#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ghost {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seed of the independent stream used by one replicate. Depends only on the
// pair (seed, replicate index), never on scheduling.
inline std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t replicate) {
  return splitmix64(splitmix64(seed) ^ splitmix64(replicate + 0x632be59bd9b4e019ULL));
}

// Thin wrapper around mt19937_64 that produces doubles in (0, 1) with an
// explicit bit recipe, so draws do not depend on the standard library's
// distribution implementations.
class ReplicateStream {
 public:
  ReplicateStream(std::uint64_t seed, std::uint64_t replicate)
      : engine_(replicate_seed(seed, replicate)) {}

  double open_unit() {
    // 53 random mantissa bits, shifted off zero.
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double exponential(double rate) { return -std::log(open_unit()) / rate; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ghost
