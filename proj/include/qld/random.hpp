#pragma once

#include <cstdint>
#include <random>

namespace qld {

// splitmix64 finalizer; used for seed derivation only.
std::uint64_t mix64(std::uint64_t z) noexcept;

// Seed for the index-th independent stream under a master seed:
// seed XOR mix64(index + 1).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

// Base generator: 64-bit Mersenne Twister (bit-exact across conforming
// standard libraries) with hand-rolled real conversions so that streams do
// not depend on the library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0,1]; safe for inverse-tail sampling.
  double uniform_pos() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Uniform on (-1,1).
  double uniform_sym() { return 2.0 * uniform_pos() - 1.0; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace qld
