#include "tailcouple/tail_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tailcouple/error.hpp"

namespace tailcouple {

namespace {

constexpr std::size_t kScanWindow = 10;

void check_rank(std::size_t k, std::size_t n) {
  if (k < 1 || k + 1 > n) {
    throw Error(ErrorCode::RankOutOfRange,
                "threshold rank " + std::to_string(k) + " outside [1, " +
                    std::to_string(n - 1) + "]");
  }
}

std::size_t clamp_rank(double raw, std::size_t n) {
  const double lo = 2.0;
  const double hi = static_cast<double>(n - 2);
  return static_cast<std::size_t>(std::clamp(std::floor(raw), lo, hi));
}

}  // namespace

TailFit hill(const Sample& s, const Transform& h, std::size_t k) {
  const auto n = s.size();
  check_rank(k, n);
  const auto v = s.values();

  const double threshold = h(v[n - k - 1]);
  if (!(threshold > 0.0)) {
    throw Error(ErrorCode::ZeroThreshold,
                "H(X_{n-k:n}) must be positive for the Hill estimator");
  }

  double sum = 0.0;
  for (std::size_t j = 1; j <= k; ++j) sum += std::log(h(v[n - j]) / threshold);

  // H is non-decreasing, so the transformed top block stays sorted.
  std::vector<double> top;
  top.reserve(k + 1);
  for (std::size_t i = n - k - 1; i < n; ++i) top.push_back(h(v[i]));

  TailFit fit;
  fit.k = k;
  fit.n = n;
  fit.threshold_value = threshold;
  fit.gamma_hat = std::max(0.0, sum / static_cast<double>(k));
  const auto distinct = static_cast<std::size_t>(
      std::distance(top.begin(), std::unique(top.begin(), top.end())));
  fit.tied_top = (k + 1) - distinct;
  fit.degenerate_tail = h(v[n - 1]) == threshold;
  fit.in_theory_range = fit.gamma_hat > 0.5 && fit.gamma_hat < 1.0;
  return fit;
}

double weissman_quantile(const TailFit& fit, double s) {
  const double u = fit.tail_mass();
  const double left = 1.0 - u;
  if (s == left) return fit.threshold_value;
  if (!(s > left && s < 1.0)) {
    throw Error(ErrorCode::ProbabilityOutOfRange,
                "Weissman extrapolation is defined on [1 - k/n, 1)");
  }
  return fit.threshold_value * std::pow(u / (1.0 - s), fit.gamma_hat);
}

std::size_t select_k(const Sample& s, const KPolicy& policy,
                     const Transform& h) {
  const auto n = s.size();
  if (n < Sample::kMinSize) {
    throw Error(ErrorCode::TooFewObservations, "k selection needs n >= 4");
  }
  const auto nd = static_cast<double>(n);
  switch (policy.kind) {
    case KPolicy::Kind::FixedFraction:
      if (!(policy.param > 0.0 && policy.param < 1.0)) {
        throw Error(ErrorCode::InvalidConfig, "fraction must lie in (0, 1)");
      }
      return clamp_rank(policy.param * nd, n);
    case KPolicy::Kind::PowerLaw:
      if (!(policy.param > 0.0 && policy.param < 1.0)) {
        throw Error(ErrorCode::InvalidConfig, "exponent must lie in (0, 1)");
      }
      return clamp_rank(std::pow(nd, policy.param), n);
    case KPolicy::Kind::StabilityScan: {
      const std::size_t lo = clamp_rank(std::pow(nd, 0.3), n);
      const std::size_t hi = clamp_rank(std::pow(nd, 0.6), n);
      if (hi < lo + kScanWindow - 1) {
        return select_k(s, KPolicy::default_policy(), h);
      }
      const auto traj = hill_trajectory(s, h, lo, hi);
      std::size_t best = lo;
      double best_sd = std::numeric_limits<double>::infinity();
      for (std::size_t start = 0; start + kScanWindow <= traj.size(); ++start) {
        double mean = 0.0;
        for (std::size_t i = 0; i < kScanWindow; ++i) {
          mean += traj[start + i].gamma_hat;
        }
        mean /= kScanWindow;
        double ss = 0.0;
        for (std::size_t i = 0; i < kScanWindow; ++i) {
          const double d = traj[start + i].gamma_hat - mean;
          ss += d * d;
        }
        const double sd = std::sqrt(ss / (kScanWindow - 1));
        if (sd < best_sd) {
          best_sd = sd;
          best = traj[start + kScanWindow / 2 - 1].k;  // lower middle
        }
      }
      return best;
    }
  }
  return clamp_rank(std::pow(nd, 0.45), n);
}

std::vector<TailFit> hill_trajectory(const Sample& s, const Transform& h,
                                     std::size_t k_from, std::size_t k_to) {
  std::vector<TailFit> out;
  if (k_from > k_to) return out;
  check_rank(k_from, s.size());
  check_rank(k_to, s.size());
  out.reserve(k_to - k_from + 1);
  for (std::size_t k = k_from; k <= k_to; ++k) out.push_back(hill(s, h, k));
  return out;
}

}  // namespace tailcouple
