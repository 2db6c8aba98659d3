#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>

namespace tailcouple {

/// Distortion function Psi on [0, 1]: non-decreasing and right-continuous.
///
/// Built-ins carry exact closed forms. A custom distortion is an evaluator plus
/// the declared regular-variation index kappa of s -> int_s^1 (1-t)^(-gamma)
/// dPsi(t) at 1; kappa is recorded for diagnostics only. An optional
/// `upper_gap(v) = Psi(1) - Psi(1 - v)` evaluator keeps tail quadrature
/// accurate when v is far below machine epsilon relative to 1.
class Distortion {
 public:
  enum class Kind { Identity, PHT, CTE, Custom };
  using Fn = std::function<double(double)>;

  static Distortion identity();
  static Distortion pht(double rho);
  static Distortion cte(double t);
  static Distortion custom(Fn psi, double kappa, Fn upper_gap = {});

  Kind kind() const noexcept { return kind_; }
  double rho() const noexcept { return param_; }  // PHT only
  double t() const noexcept { return param_; }    // CTE only
  std::optional<double> declared_kappa() const noexcept { return kappa_; }

  double operator()(double s) const;
  double upper_gap(double v) const;
  // False when upper_gap falls back to differencing a custom Psi near 1.
  bool exact_upper_gap() const noexcept { return kind_ != Kind::Custom || static_cast<bool>(gap_); }

  std::string describe() const;

 private:
  Distortion(Kind kind, double param) : kind_(kind), param_(param) {}

  Kind kind_;
  double param_ = 0.0;
  Fn psi_;
  Fn gap_;
  std::optional<double> kappa_;
};

/// Monotone loss transform H: [0, inf) -> [0, inf).
class Transform {
 public:
  enum class Kind { Identity, Power, Custom };
  using Fn = std::function<double(double)>;

  static Transform identity();
  static Transform power(double beta);
  static Transform custom(Fn h, std::string name = "custom");

  Kind kind() const noexcept { return kind_; }
  double beta() const noexcept { return beta_; }
  double operator()(double x) const;
  std::string describe() const;

 private:
  Transform(Kind kind, double beta) : kind_(kind), beta_(beta) {}

  Kind kind_;
  double beta_ = 1.0;
  Fn h_;
  std::string name_;
};

struct MeasureSpec {
  Distortion psi = Distortion::identity();
  Transform h = Transform::identity();
  std::string label;
};

double psi_eval(const Distortion& d, double s);

// c_{j,n} = Psi(j/n) - Psi((j-1)/n)
double coefficient(const Distortion& d, std::size_t n, std::size_t j);

/// int_{1-u}^1 (1-s)^(-gamma) dPsi(s) for tail mass u = k/n.
///
/// Closed forms for the built-ins; custom distortions go through
/// integration by parts and adaptive quadrature. Throws TailDivergence when
/// the integral is infinite, ThresholdConflict for CTE with u >= 1 - t.
double tail_integral(const Distortion& d, double gamma, double u);

// Always the quadrature route, whatever the kind. Used to cross-check the
// closed forms.
double tail_integral_quadrature(const Distortion& d, double gamma, double u);

/// Weissman tail coefficient u^gamma * tail_integral(d, gamma, u), written in
/// the reduced forms u^(1/rho)/(1-rho*gamma) (PHT) and u/((1-t)(1-gamma)) (CTE).
double tail_coefficient(const Distortion& d, double gamma, double u);

}  // namespace tailcouple
