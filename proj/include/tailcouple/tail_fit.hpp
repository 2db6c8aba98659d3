#pragma once

#include <cstddef>
#include <vector>

#include "tailcouple/measure.hpp"
#include "tailcouple/sample.hpp"

namespace tailcouple {

/// Hill fit at threshold rank k on H-transformed data.
struct TailFit {
  double gamma_hat = 0.0;
  std::size_t k = 0;
  std::size_t n = 0;
  double threshold_value = 0.0;  // H(X_{n-k:n})
  std::size_t tied_top = 0;      // top k+1 values lost to ties
  bool in_theory_range = false;  // 1/2 < gamma_hat < 1
  bool degenerate_tail = false;  // threshold equals the sample maximum

  double tail_mass() const noexcept {
    return static_cast<double>(k) / static_cast<double>(n);
  }
};

TailFit hill(const Sample& s, const Transform& h, std::size_t k);

/// Weissman extrapolation (k/n)^g * H(X_{n-k:n}) * (1-s)^-g on [1-k/n, 1).
double weissman_quantile(const TailFit& fit, double s);

struct KPolicy {
  enum class Kind { FixedFraction, PowerLaw, StabilityScan };
  Kind kind = Kind::PowerLaw;
  double param = 0.45;

  static KPolicy fixed_fraction(double c) { return {Kind::FixedFraction, c}; }
  static KPolicy power_law(double a) { return {Kind::PowerLaw, a}; }
  static KPolicy stability_scan() { return {Kind::StabilityScan, 0.0}; }
  static KPolicy default_policy() { return power_law(0.45); }
};

// Result is always clamped to [2, n-2].
std::size_t select_k(const Sample& s, const KPolicy& policy,
                     const Transform& h = Transform::identity());

// One fit per k in [k_from, k_to], ascending; empty when k_from > k_to.
std::vector<TailFit> hill_trajectory(const Sample& s, const Transform& h,
                                     std::size_t k_from, std::size_t k_to);

}  // namespace tailcouple
