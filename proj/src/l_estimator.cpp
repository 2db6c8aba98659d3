#include "tailcouple/l_estimator.hpp"

#include <cmath>
#include <string>

#include "tailcouple/error.hpp"

namespace tailcouple {

namespace {

// Neumaier's variant of compensated summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      c_ += (sum_ - t) + x;
    } else {
      c_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + c_; }

 private:
  double sum_ = 0.0;
  double c_ = 0.0;
};

}  // namespace

double LEstimate::sqrt_nk_d() const {
  return std::sqrt(static_cast<double>(fit.n) / static_cast<double>(k)) * d_hat;
}

double estimate_trunc(const Sample& s, const MeasureSpec& spec, std::size_t k) {
  const auto n = s.size();
  if (k < 1 || k + 2 > n) {
    throw Error(ErrorCode::RankOutOfRange,
                "truncation rank " + std::to_string(k) + " outside [1, n-2]");
  }
  const auto v = s.values();
  CompensatedSum acc;
  for (std::size_t j = 1; j <= n - k; ++j) {
    const double c = coefficient(spec.psi, n, j);
    if (c != 0.0) acc.add(c * spec.h(v[j - 1]));
  }
  return acc.value();
}

double estimate_tail(const Sample& s, const MeasureSpec& spec,
                     const TailFit& fit) {
  if (fit.n != s.size()) {
    throw Error(ErrorCode::ArgumentOutOfRange, "tail fit belongs to another sample");
  }
  return tail_coefficient(spec.psi, fit.gamma_hat, fit.tail_mass()) *
         fit.threshold_value;
}

LEstimate estimate_l(const Sample& s, const MeasureSpec& spec, std::size_t k) {
  return estimate_l(s, spec, hill(s, spec.h, k));
}

LEstimate estimate_l(const Sample& s, const MeasureSpec& spec,
                     const TailFit& fit) {
  LEstimate est;
  est.k = fit.k;
  est.fit = fit;
  est.spec = spec;
  est.trunc_part = estimate_trunc(s, spec, fit.k);
  est.tail_part = estimate_tail(s, spec, fit);
  est.total = est.trunc_part + est.tail_part;
  est.d_hat = est.tail_part;
  return est;
}

}  // namespace tailcouple
