#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "tailcouple/sample.hpp"

namespace fixtures {

// Deterministic Pareto quantile grid: (1 - j/(n+1))^-gamma, j = 1..n.
inline tailcouple::Sample pareto_grid(std::size_t n, double gamma) {
  std::vector<double> v(n);
  for (std::size_t j = 1; j <= n; ++j) {
    v[j - 1] = std::pow(1.0 - static_cast<double>(j) / static_cast<double>(n + 1), -gamma);
  }
  return tailcouple::build_sample(v, "grid");
}

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::abs(want);
}

}  // namespace fixtures
