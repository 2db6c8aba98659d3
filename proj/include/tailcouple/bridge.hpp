#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tailcouple/measure.hpp"

namespace tailcouple {

/// Weights of the leading Gaussian term l(B) = a1 W1 + a2 W2 + a3 W3, where
///   W1 = normalized int_0^{1-k/n} (1-s)^{1/rho-1} B(s) dQ(s),
///   W2 = sqrt(n/k) B(1-k/n),
///   W3 = sqrt(n/k) int_{1-k/n}^1 B(s)/(1-s) ds,
/// and Q is the Pareto reference quantile (1-s)^-gamma.
struct EllCoefficients {
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;
  double rho_eff = 1.0;
  double gamma = 0.0;
};

// Throws TailDivergence when 1/rho - gamma <= 0, VarianceUnavailable for
// custom distortions.
EllCoefficients ell_coefficients(const Distortion& d, double gamma);

/// Limiting second moments of (W1, W2, W3) for one (gamma, rho).
///
/// `e12` is the covariance-kernel value gamma*rho/(rho + gamma*rho - 1); the
/// closed-form list this table is usually quoted from prints
/// gamma*rho/(1/rho - gamma - 1) instead, kept in `e12_printed`. The value
/// that would make the quadratic form reproduce the PHT variance formula is
/// kept in `e12_var1_consistent`. All three agree in magnitude at rho = 1,
/// where only the kernel sign reproduces the variance formulas.
struct WMomentTable {
  double e11 = 0.0;
  double e22 = 1.0;
  double e33 = 2.0;
  double e12 = 0.0;
  double e13 = 0.0;
  double e23 = 1.0;
  double e12_printed = 0.0;
  double e12_var1_consistent = 0.0;
};

WMomentTable w_moment_table(double gamma, double rho);

/// Identifies one W1 variable; W1 depends on the measure only through
/// beta = 1/rho - gamma and the scale gamma.
struct W1Index {
  double gamma = 0.0;
  double rho = 1.0;
  friend bool operator==(const W1Index&, const W1Index&) = default;
};

/// Symmetric matrix of second moments over the basis
/// (W1[0], ..., W1[m-1], W2, W3).
class MomentMatrix {
 public:
  MomentMatrix() = default;
  explicit MomentMatrix(std::vector<W1Index> w1);

  std::size_t dim() const noexcept { return dim_; }
  const std::vector<W1Index>& w1() const noexcept { return w1_; }
  std::size_t w2() const noexcept { return dim_ - 2; }
  std::size_t w3() const noexcept { return dim_ - 1; }

  double operator()(std::size_t i, std::size_t j) const { return m_[i * dim_ + j]; }
  void set(std::size_t i, std::size_t j, double v);

  double quadratic_form(std::span<const double> v) const;

 private:
  std::vector<W1Index> w1_;
  std::size_t dim_ = 0;
  std::vector<double> m_;
};

// n -> infinity limits from the bridge covariance kernel min(s,t) - st.
// Requires beta_i + beta_j < 1 for every W1 pair (else VarianceUndefined).
MomentMatrix limit_moments(std::span<const W1Index> w1);

// Exact moments at finite tail mass u = k/n from the same kernel.
MomentMatrix finite_moments(std::span<const W1Index> w1, double u);

struct BridgeSimConfig {
  double k_over_n = 0.005;
  std::size_t grid = 20000;
  std::size_t reps = 4000;
  std::uint64_t seed = 7;
};

struct BridgeMoments {
  MomentMatrix mean;
  MomentMatrix stderr_;
  BridgeSimConfig config;
};

/// Monte Carlo realization of the W variables on a discretized Brownian
/// bridge: uniform grid of `grid` cells on [0, 1-k/n] and a log-spaced grid on
/// [1-k/n, 1). Throws GridTooCoarse for grid < 1e4.
BridgeMoments simulate_bridge_moments(std::span<const W1Index> w1,
                                      const BridgeSimConfig& config);

struct AsymptoticVariance {
  double closed_form = 0.0;     // PHT/mean variance formula, or the CTE one
  double quadratic_form = 0.0;  // a' M a with the kernel moment table
  double relative_gap() const;
};

// Throws VarianceUndefined when the variance is infinite (e.g. gamma <= 1/2).
AsymptoticVariance asymptotic_variance(const Distortion& d, double gamma);

struct VarianceMode {
  enum class Kind { ClosedForm, KernelLimit, BridgeSim };
  Kind kind = Kind::ClosedForm;
  BridgeSimConfig sim;

  static VarianceMode closed_form() { return {Kind::ClosedForm, {}}; }
  static VarianceMode kernel_limit() { return {Kind::KernelLimit, {}}; }
  static VarianceMode bridge_sim(const BridgeSimConfig& c) { return {Kind::BridgeSim, c}; }
};

struct Partials {
  double hx = 0.0;
  double hy = 0.0;
};

/// Var of delta*Hx*l1 + (1-delta)*Hy*l2 over a shared bridge.
///
/// ClosedForm needs both measures to share one W1 (same gamma and rho_eff);
/// otherwise use KernelLimit or BridgeSim. A measure whose weight
/// vanishes does not enter the basis.
double variance_coupled(const EllCoefficients& first,
                        const EllCoefficients& second, double delta,
                        const Partials& partials, const VarianceMode& mode);

}  // namespace tailcouple
