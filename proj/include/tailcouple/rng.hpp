#pragma once

#include <cstdint>
#include <random>

namespace tailcouple {

// Counter-based child seed: splitmix64 finalizer over (seed, index).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

// Deterministic generator with platform-independent uniform and normal draws
// (std distributions are implementation defined, so they are not used).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [2^-53, 1 - 2^-53]; never returns 0 or 1.
  double open_uniform();
  // Standard normal via Box-Muller.
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace tailcouple
