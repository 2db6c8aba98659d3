#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tailcouple/bridge.hpp"
#include "tailcouple/l_estimator.hpp"

namespace tailcouple {

/// Coupling map H(x, y) joining two L-functionals.
class Coupling {
 public:
  enum class Kind { First, Ratio, Zenga, Custom };
  using Fn = std::function<double(double, double)>;
  using PartialsFn = std::function<Partials(double, double)>;

  static Coupling first();
  static Coupling ratio();
  // 1 - 1/p + (1/p)(y/x); p = 1 gives y/x.
  static Coupling zenga(double p);
  static Coupling custom(Fn fn, PartialsFn partials = {});

  Kind kind() const noexcept { return kind_; }
  double p() const noexcept { return p_; }
  std::string describe() const;

 private:
  friend struct CouplingAccess;
  Coupling(Kind kind, double p) : kind_(kind), p_(p) {}
  Kind kind_;
  double p_ = 1.0;
  Fn fn_;
  PartialsFn partials_;
};

struct CouplingValue {
  double value = 0.0;
  Partials partials;
};

// Closed-form partials for built-ins; custom couplings without partials use
// central differences with step 1e-6 * max(1, |arg|).
CouplingValue couple_eval(const Coupling& c, double x, double y);

double delta_weight(double d1, double d2);

/// Second-order inputs for the bias term: b_i = lim sqrt(k) A_i(n/k) and the
/// second-order parameter omega_i <= 0.
struct BiasInputs {
  double b1 = 0.0;
  double omega1 = 0.0;
  double b2 = 0.0;
  double omega2 = 0.0;
};

// lambda = delta*Hx*(-b1 d1/omega1) + (1-delta)*Hy*(-b2 d2/omega2) with
// d = omega / (1/rho - gamma - omega).
double bias_lambda(const BiasInputs& bias, const EllCoefficients& first,
                   const EllCoefficients& second, double delta,
                   const Partials& partials);

struct ConfidenceInterval {
  double lo = 0.0;
  double hi = 0.0;
};

struct EstimateOptions {
  double alpha = 0.05;
  std::optional<BiasInputs> bias;
  // Defaults to the closed-form table when both measures share W1 and to the
  // kernel limit otherwise.
  std::optional<VarianceMode> variance_mode;
};

struct CoupledEstimate {
  double point = 0.0;
  LEstimate l1;
  std::optional<LEstimate> l2;
  double delta_hat = 1.0;
  Partials partials;
  std::optional<double> sigma2;
  double lambda = 0.0;
  double half_width_scale = 0.0;  // (D1 + D2) / sqrt(k)
  double alpha = 0.05;
  std::optional<ConfidenceInterval> ci;
  std::vector<std::string> warnings;
};

/// Point estimate H(L1, L2) with a normal-theory interval.
///
/// Both measures use the same threshold rank k; each gets its own Hill fit on
/// its transformed data. `spec2` may be omitted only for the First coupling.
/// Out-of-range tail indices or missing variance machinery leave `ci` empty
/// and add a warning instead of failing.
CoupledEstimate estimate_coupled(const Sample& s, const MeasureSpec& spec1,
                                 const std::optional<MeasureSpec>& spec2,
                                 const Coupling& coupling, std::size_t k,
                                 const EstimateOptions& options = {});

struct SingleEstimate {
  LEstimate l;
  std::optional<double> sigma2;
  std::optional<ConfidenceInterval> ci;
};

// One L-functional on its own: sigma^2 from the quadratic form, half-width
// scale D_hat / sqrt(k).
SingleEstimate estimate_single(const Sample& s, const MeasureSpec& spec,
                               std::size_t k, double alpha = 0.05);

}  // namespace tailcouple
