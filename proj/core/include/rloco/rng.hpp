#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace rloco {

// Derives an independent stream seed from a root seed, a component label and
// an index. All randomness in the project flows through this so that adding a
// consumer never perturbs another consumer's stream.
std::uint64_t derive_seed(std::uint64_t root, std::string_view label,
                          std::uint64_t index = 0);

// Thin wrapper around mt19937_64 with portable uniform draws. The standard
// distributions are implementation-defined, so we map raw bits ourselves.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t bits() { return gen_(); }

  // Uniform double in [0, 1), 53 bits of precision.
  double u01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

  // Uniform integer in [0, bound). bound must be > 0.
  std::size_t index(std::size_t bound) {
    return static_cast<std::size_t>(
        (static_cast<unsigned __int128>(gen_()) * bound) >> 64);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace rloco
