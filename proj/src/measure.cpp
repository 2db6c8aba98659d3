#include "tailcouple/measure.hpp"

#include <algorithm>
#include <cmath>

#include "tailcouple/error.hpp"
#include "tailcouple/format.hpp"
#include "tailcouple/quadrature.hpp"

namespace tailcouple {

namespace {

constexpr std::size_t kMonotoneGrid = 1001;

void check_unit(double s) {
  if (!(s >= 0.0 && s <= 1.0)) {
    throw Error(ErrorCode::ArgumentOutOfRange,
                "distortion argument must lie in [0, 1]");
  }
}

void check_tail_args(double gamma, double u) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw Error(ErrorCode::ArgumentOutOfRange, "tail index must be >= 0");
  }
  if (!(u > 0.0 && u < 1.0)) {
    throw Error(ErrorCode::ArgumentOutOfRange, "tail mass must lie in (0, 1)");
  }
}

[[noreturn]] void diverges(const std::string& what) {
  throw Error(ErrorCode::TailDivergence, what);
}

}  // namespace

Distortion Distortion::identity() { return Distortion(Kind::Identity, 0.0); }

Distortion Distortion::pht(double rho) {
  if (!(rho >= 1.0) || !std::isfinite(rho)) {
    throw Error(ErrorCode::ArgumentOutOfRange, "PHT requires rho >= 1");
  }
  return Distortion(Kind::PHT, rho);
}

Distortion Distortion::cte(double t) {
  if (!(t >= 0.0 && t < 1.0)) {
    throw Error(ErrorCode::ArgumentOutOfRange, "CTE requires t in [0, 1)");
  }
  return Distortion(Kind::CTE, t);
}

Distortion Distortion::custom(Fn psi, double kappa, Fn upper_gap) {
  if (!psi) throw Error(ErrorCode::ArgumentOutOfRange, "empty distortion");
  double prev = psi(0.0);
  for (std::size_t i = 1; i < kMonotoneGrid; ++i) {
    const double s = static_cast<double>(i) / (kMonotoneGrid - 1);
    const double cur = psi(s);
    if (!std::isfinite(cur) || cur < prev) {
      throw Error(ErrorCode::ArgumentOutOfRange,
                  "custom distortion is not non-decreasing on [0, 1]");
    }
    prev = cur;
  }
  Distortion d(Kind::Custom, 0.0);
  d.psi_ = std::move(psi);
  d.gap_ = std::move(upper_gap);
  d.kappa_ = kappa;
  return d;
}

double Distortion::operator()(double s) const {
  check_unit(s);
  switch (kind_) {
    case Kind::Identity: return s;
    case Kind::PHT: return -std::pow(1.0 - s, 1.0 / param_);
    case Kind::CTE: return std::max(0.0, s - param_) / (1.0 - param_);
    case Kind::Custom: return psi_(s);
  }
  return 0.0;
}

double Distortion::upper_gap(double v) const {
  check_unit(v);
  switch (kind_) {
    case Kind::Identity: return v;
    case Kind::PHT: return std::pow(v, 1.0 / param_);
    case Kind::CTE: return std::min(v, 1.0 - param_) / (1.0 - param_);
    case Kind::Custom:
      return gap_ ? gap_(v) : psi_(1.0) - psi_(1.0 - v);
  }
  return 0.0;
}

std::string Distortion::describe() const {
  switch (kind_) {
    case Kind::Identity: return "mean";
    case Kind::PHT: return "pht:rho=" + format_double(param_);
    case Kind::CTE: return "cte:t=" + format_double(param_);
    case Kind::Custom: return "custom";
  }
  return {};
}

Transform Transform::identity() { return Transform(Kind::Identity, 1.0); }

Transform Transform::power(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorCode::ArgumentOutOfRange, "power transform needs beta > 0");
  }
  return Transform(Kind::Power, beta);
}

Transform Transform::custom(Fn h, std::string name) {
  if (!h) throw Error(ErrorCode::ArgumentOutOfRange, "empty transform");
  if (h(0.0) < 0.0) {
    throw Error(ErrorCode::ArgumentOutOfRange, "transform requires H(0) >= 0");
  }
  Transform tr(Kind::Custom, 1.0);
  tr.h_ = std::move(h);
  tr.name_ = std::move(name);
  return tr;
}

double Transform::operator()(double x) const {
  switch (kind_) {
    case Kind::Identity: return x;
    case Kind::Power: return std::pow(x, beta_);
    case Kind::Custom: return h_(x);
  }
  return x;
}

std::string Transform::describe() const {
  switch (kind_) {
    case Kind::Identity: return "identity";
    case Kind::Power: return "power:beta=" + format_double(beta_);
    case Kind::Custom: return name_;
  }
  return {};
}

double psi_eval(const Distortion& d, double s) { return d(s); }

double coefficient(const Distortion& d, std::size_t n, std::size_t j) {
  if (n == 0 || j < 1 || j > n) {
    throw Error(ErrorCode::RankOutOfRange, "coefficient rank outside [1, n]");
  }
  const auto nd = static_cast<double>(n);
  const auto jd = static_cast<double>(j);
  switch (d.kind()) {
    case Distortion::Kind::Identity:
      return 1.0 / nd;
    case Distortion::Kind::PHT: {
      const double p = 1.0 / d.rho();
      return std::pow((nd - jd + 1.0) / nd, p) - std::pow((nd - jd) / nd, p);
    }
    case Distortion::Kind::CTE: {
      // Written on the rank scale so that j <= floor(n t) is exactly zero.
      const double nt = nd * d.t();
      return (std::max(0.0, jd - nt) - std::max(0.0, jd - 1.0 - nt)) /
             (nd * (1.0 - d.t()));
    }
    case Distortion::Kind::Custom:
      return d(jd / nd) - d((jd - 1.0) / nd);
  }
  return 0.0;
}

double tail_integral(const Distortion& d, double gamma, double u) {
  check_tail_args(gamma, u);
  switch (d.kind()) {
    case Distortion::Kind::Identity:
      if (gamma >= 1.0) diverges("mean tail integral needs gamma < 1");
      return std::pow(u, 1.0 - gamma) / (1.0 - gamma);
    case Distortion::Kind::PHT: {
      const double p = 1.0 / d.rho();
      if (p - gamma <= 0.0) diverges("PHT tail integral needs rho * gamma < 1");
      return p * std::pow(u, p - gamma) / (p - gamma);
    }
    case Distortion::Kind::CTE:
      if (gamma >= 1.0) diverges("CTE tail integral needs gamma < 1");
      if (u >= 1.0 - d.t()) {
        throw Error(ErrorCode::ThresholdConflict,
                    "CTE tail mass k/n must be below 1 - t");
      }
      return std::pow(u, 1.0 - gamma) / ((1.0 - gamma) * (1.0 - d.t()));
    case Distortion::Kind::Custom:
      return tail_integral_quadrature(d, gamma, u);
  }
  return 0.0;
}

double tail_integral_quadrature(const Distortion& d, double gamma, double u) {
  check_tail_args(gamma, u);
  // By parts with G(v) = Psi(1) - Psi(1 - v):
  //   int_{1-u}^1 (1-s)^-g dPsi = u^-g G(u) + g int_0^u G(v) v^(-g-1) dv.
  // When the decay of G v^(-g-1) is slow most of the mass sits below any
  // representable v, so the piece under v0 is added in closed form from the
  // local power index of G at v0.
  const double boundary = std::pow(u, -gamma) * d.upper_gap(u);
  double body = 0.0;
  if (gamma > 0.0) {
    const int octaves = d.exact_upper_gap() ? 40 : 20;
    const double v0 = std::ldexp(u, -octaves);
    const double g0 = d.upper_gap(v0);
    const double g1 = d.upper_gap(0.5 * v0);
    double below = 0.0;
    if (g0 > 0.0) {
      const double index = g1 > 0.0 ? std::log2(g0 / g1) : 0.0;
      const double rate = index - gamma;
      if (!(rate > 0.0)) diverges("tail integral does not converge");
      below = g0 * std::pow(v0, -gamma) / rate;
    }
    // v = u e^-t turns G(v) v^(-g-1) dv into a smooth integrand in t.
    const double t_max = octaves * std::log(2.0);
    const double above = quad::integrate(
        [&](double t) {
          const double v = u * std::exp(-t);
          return d.upper_gap(v) * std::pow(v, -gamma);
        },
        0.0, t_max);
    body = gamma * (above + below);
  }
  const double total = boundary + body;
  if (!std::isfinite(total)) diverges("tail integral does not converge");
  return total;
}

double tail_coefficient(const Distortion& d, double gamma, double u) {
  check_tail_args(gamma, u);
  switch (d.kind()) {
    case Distortion::Kind::Identity:
      if (gamma >= 1.0) diverges("mean tail integral needs gamma < 1");
      return u / (1.0 - gamma);
    case Distortion::Kind::PHT: {
      const double rho = d.rho();
      if (1.0 / rho - gamma <= 0.0) {
        diverges("PHT tail integral needs rho * gamma < 1");
      }
      return std::pow(u, 1.0 / rho) / (1.0 - rho * gamma);
    }
    case Distortion::Kind::CTE:
      if (gamma >= 1.0) diverges("CTE tail integral needs gamma < 1");
      if (u >= 1.0 - d.t()) {
        throw Error(ErrorCode::ThresholdConflict,
                    "CTE tail mass k/n must be below 1 - t");
      }
      return u / ((1.0 - d.t()) * (1.0 - gamma));
    case Distortion::Kind::Custom:
      return std::pow(u, gamma) * tail_integral_quadrature(d, gamma, u);
  }
  return 0.0;
}

}  // namespace tailcouple
