#include "tailcouple/rng.hpp"

#include <cmath>
#include <numbers>

namespace tailcouple {

namespace {

std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return mix(mix(seed + 0x9e3779b97f4a7c15ULL) ^ (index * 0xd1b54a32d192ed03ULL));
}

double Rng::open_uniform() {
  constexpr double scale = 0x1.0p-53;
  std::uint64_t bits = 0;
  do {
    bits = engine_() >> 11;
  } while (bits == 0);
  return static_cast<double>(bits) * scale;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double r = std::sqrt(-2.0 * std::log(open_uniform()));
  const double theta = 2.0 * std::numbers::pi * open_uniform();
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

}  // namespace tailcouple
