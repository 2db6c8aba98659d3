#pragma once

#include <cstddef>

#include "tailcouple/measure.hpp"
#include "tailcouple/sample.hpp"
#include "tailcouple/tail_fit.hpp"

namespace tailcouple {

// Two-piece estimate of L[F] = int H(Q) dPsi: an L-statistic over the lower
// n-k order statistics plus a Weissman-extrapolated tail piece. The plug-in
// normalization d_hat coincides with tail_part by construction.
struct LEstimate {
  double trunc_part = 0.0;
  double tail_part = 0.0;
  double total = 0.0;
  double d_hat = 0.0;
  TailFit fit;
  std::size_t k = 0;
  MeasureSpec spec;

  // sqrt(n/k) * D_hat; should grow without bound along a valid k sequence.
  double sqrt_nk_d() const;
};

double estimate_trunc(const Sample& s, const MeasureSpec& spec, std::size_t k);
double estimate_tail(const Sample& s, const MeasureSpec& spec,
                     const TailFit& fit);

LEstimate estimate_l(const Sample& s, const MeasureSpec& spec, std::size_t k);
// Uses a caller-supplied tail fit (e.g. one computed elsewhere or fixed).
LEstimate estimate_l(const Sample& s, const MeasureSpec& spec,
                     const TailFit& fit);

}  // namespace tailcouple
