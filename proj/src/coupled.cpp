#include "tailcouple/coupled.hpp"

#include <algorithm>
#include <cmath>

#include "tailcouple/error.hpp"
#include "tailcouple/format.hpp"
#include "tailcouple/normal.hpp"

namespace tailcouple {

struct CouplingAccess {
  static const Coupling::Fn& fn(const Coupling& c) { return c.fn_; }
  static const Coupling::PartialsFn& partials(const Coupling& c) { return c.partials_; }
  static Coupling make_custom(Coupling::Fn fn, Coupling::PartialsFn partials) {
    Coupling c(Coupling::Kind::Custom, 1.0);
    c.fn_ = std::move(fn);
    c.partials_ = std::move(partials);
    return c;
  }
};

Coupling Coupling::first() { return Coupling(Kind::First, 1.0); }
Coupling Coupling::ratio() { return Coupling(Kind::Ratio, 1.0); }

Coupling Coupling::zenga(double p) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::ArgumentOutOfRange, "Zenga coupling needs p in (0, 1]");
  }
  return Coupling(Kind::Zenga, p);
}

Coupling Coupling::custom(Fn fn, PartialsFn partials) {
  if (!fn) throw Error(ErrorCode::ArgumentOutOfRange, "empty coupling");
  return CouplingAccess::make_custom(std::move(fn), std::move(partials));
}

std::string Coupling::describe() const {
  switch (kind_) {
    case Kind::First: return "first";
    case Kind::Ratio: return "ratio";
    case Kind::Zenga: return "zenga:p=" + format_double(p_);
    case Kind::Custom: return "custom";
  }
  return {};
}

CouplingValue couple_eval(const Coupling& c, double x, double y) {
  CouplingValue out;
  switch (c.kind()) {
    case Coupling::Kind::First:
      out.value = x;
      out.partials = {1.0, 0.0};
      return out;
    case Coupling::Kind::Ratio:
      if (y == 0.0) throw Error(ErrorCode::DivisionByZero, "ratio coupling with y = 0");
      out.value = x / y;
      out.partials = {1.0 / y, -x / (y * y)};
      return out;
    case Coupling::Kind::Zenga: {
      if (x == 0.0) throw Error(ErrorCode::DivisionByZero, "Zenga coupling with x = 0");
      const double p = c.p();
      out.value = 1.0 - 1.0 / p + (y / x) / p;
      out.partials = {-(y / (x * x)) / p, (1.0 / x) / p};
      return out;
    }
    case Coupling::Kind::Custom: {
      const auto& fn = CouplingAccess::fn(c);
      out.value = fn(x, y);
      if (const auto& pf = CouplingAccess::partials(c)) {
        out.partials = pf(x, y);
      } else {
        const double hx = 1e-6 * std::max(1.0, std::abs(x));
        const double hy = 1e-6 * std::max(1.0, std::abs(y));
        out.partials.hx = (fn(x + hx, y) - fn(x - hx, y)) / (2.0 * hx);
        out.partials.hy = (fn(x, y + hy) - fn(x, y - hy)) / (2.0 * hy);
      }
      if (!std::isfinite(out.value)) {
        throw Error(ErrorCode::DivisionByZero, "custom coupling is not finite here");
      }
      return out;
    }
  }
  return out;
}

double delta_weight(double d1, double d2) {
  if (!(d1 >= 0.0 && d2 >= 0.0)) {
    throw Error(ErrorCode::ArgumentOutOfRange, "normalizations must be >= 0");
  }
  if (d1 + d2 == 0.0) throw Error(ErrorCode::BothZero, "D1 + D2 = 0");
  return d1 / (d1 + d2);
}

namespace {

double bias_term(double b, double omega, const EllCoefficients& e) {
  if (b == 0.0) return 0.0;
  if (omega > 0.0) {
    throw Error(ErrorCode::UndefinedBias, "second-order parameter must be <= 0");
  }
  if (omega == 0.0) {
    throw Error(ErrorCode::UndefinedBias,
                "omega = 0 with nonzero b (logarithmic second order) is not supported");
  }
  const double denom = 1.0 / e.rho_eff - e.gamma - omega;
  if (!(denom > 0.0)) {
    throw Error(ErrorCode::UndefinedBias, "bias needs 1/rho - gamma - omega > 0");
  }
  const double d = omega / denom;
  return -b * d / omega;
}

bool shares_w1(const EllCoefficients& a, const EllCoefficients& b) {
  return a.gamma == b.gamma && a.rho_eff == b.rho_eff;
}

std::optional<EllCoefficients> try_ell(const MeasureSpec& spec, double gamma,
                                       std::vector<std::string>& warnings,
                                       const std::string& tag) {
  if (spec.h.kind() == Transform::Kind::Custom) {
    warnings.push_back("variance_unavailable:" + tag);
    return std::nullopt;
  }
  try {
    return ell_coefficients(spec.psi, gamma);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::VarianceUnavailable) {
      warnings.push_back("variance_unavailable:" + tag);
      return std::nullopt;
    }
    throw;
  }
}

void tail_warnings(const LEstimate& l, const std::string& tag,
                   std::vector<std::string>& warnings) {
  if (!l.fit.in_theory_range) warnings.push_back("gamma_out_of_theory_range:" + tag);
  if (l.fit.degenerate_tail) warnings.push_back("degenerate_tail:" + tag);
  if (l.fit.tied_top > 0) warnings.push_back("tied_top_values:" + tag);
}

}  // namespace

double bias_lambda(const BiasInputs& bias, const EllCoefficients& first,
                   const EllCoefficients& second, double delta,
                   const Partials& partials) {
  double lambda = 0.0;
  const double c1 = delta * partials.hx;
  const double c2 = (1.0 - delta) * partials.hy;
  if (c1 != 0.0) lambda += c1 * bias_term(bias.b1, bias.omega1, first);
  if (c2 != 0.0) lambda += c2 * bias_term(bias.b2, bias.omega2, second);
  return lambda;
}

CoupledEstimate estimate_coupled(const Sample& s, const MeasureSpec& spec1,
                                 const std::optional<MeasureSpec>& spec2,
                                 const Coupling& coupling, std::size_t k,
                                 const EstimateOptions& options) {
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "alpha must lie in (0, 1)");
  }
  const bool first_only = coupling.kind() == Coupling::Kind::First;
  if (!first_only && !spec2) {
    throw Error(ErrorCode::InvalidConfig, "coupling " + coupling.describe() +
                                              " needs a second measure");
  }

  CoupledEstimate out;
  out.alpha = options.alpha;
  out.l1 = estimate_l(s, spec1, k);
  tail_warnings(out.l1, "measure1", out.warnings);

  if (first_only) {
    if (spec2) {
      try {
        out.l2 = estimate_l(s, *spec2, k);
      } catch (const Error&) {
        out.warnings.push_back("measure2_unavailable");
      }
    }
    out.delta_hat = 1.0;
    out.partials = {1.0, 0.0};
    out.point = out.l1.total;
    out.half_width_scale = out.l1.d_hat / std::sqrt(static_cast<double>(k));
  } else {
    out.l2 = estimate_l(s, *spec2, k);
    tail_warnings(*out.l2, "measure2", out.warnings);
    const auto cv = couple_eval(coupling, out.l1.total, out.l2->total);
    out.point = cv.value;
    out.partials = cv.partials;
    out.delta_hat = delta_weight(out.l1.d_hat, out.l2->d_hat);
    out.half_width_scale =
        (out.l1.d_hat + out.l2->d_hat) / std::sqrt(static_cast<double>(k));
  }

  const double c1 = out.delta_hat * out.partials.hx;
  const double c2 = (1.0 - out.delta_hat) * out.partials.hy;
  if (c1 == 0.0 && c2 == 0.0) out.warnings.push_back("degenerate_partials");

  bool ci_allowed = true;
  if (c1 != 0.0 && !out.l1.fit.in_theory_range) ci_allowed = false;
  if (c2 != 0.0 && !out.l2->fit.in_theory_range) ci_allowed = false;

  std::optional<EllCoefficients> e1;
  std::optional<EllCoefficients> e2;
  if (c1 != 0.0) e1 = try_ell(spec1, out.l1.fit.gamma_hat, out.warnings, "measure1");
  if (c2 != 0.0) e2 = try_ell(*spec2, out.l2->fit.gamma_hat, out.warnings, "measure2");
  const bool have_coeffs = (c1 == 0.0 || e1) && (c2 == 0.0 || e2);

  // Placeholder coefficients for an inert side; they never enter the basis.
  const EllCoefficients first_c = e1.value_or(e2.value_or(EllCoefficients{}));
  const EllCoefficients second_c = e2.value_or(first_c);

  if (have_coeffs) {
    if (options.bias) {
      out.lambda = bias_lambda(*options.bias, first_c, second_c, out.delta_hat,
                               out.partials);
    }
    VarianceMode mode = options.variance_mode.value_or(
        (c1 == 0.0 || c2 == 0.0 || shares_w1(first_c, second_c))
            ? VarianceMode::closed_form()
            : VarianceMode::kernel_limit());
    try {
      out.sigma2 =
          variance_coupled(first_c, second_c, out.delta_hat, out.partials, mode);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::VarianceUndefined &&
          e.code() != ErrorCode::VarianceUnavailable) {
        throw;
      }
      out.warnings.push_back(e.code() == ErrorCode::VarianceUndefined
                                 ? "variance_undefined"
                                 : "variance_unavailable");
    }
    for (const auto* e : {&e1, &e2}) {
      if (*e && (*e)->rho_eff != 1.0) {
        out.warnings.push_back("pht_variance_formula_differs_from_kernel");
        break;
      }
    }
  }

  if (!ci_allowed) out.warnings.push_back("ci_suppressed");
  if (ci_allowed && out.sigma2) {
    const double z = normal_quantile(1.0 - options.alpha / 2.0);
    const double w = out.half_width_scale;
    const double centre = out.point - out.lambda * w;
    const double half = z * std::sqrt(*out.sigma2) * w;
    out.ci = ConfidenceInterval{centre - half, centre + half};
  }
  return out;
}

SingleEstimate estimate_single(const Sample& s, const MeasureSpec& spec,
                               std::size_t k, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "alpha must lie in (0, 1)");
  }
  SingleEstimate out;
  out.l = estimate_l(s, spec, k);
  if (!out.l.fit.in_theory_range || spec.h.kind() == Transform::Kind::Custom) {
    return out;
  }
  try {
    out.sigma2 = asymptotic_variance(spec.psi, out.l.fit.gamma_hat).quadratic_form;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::VarianceUndefined &&
        e.code() != ErrorCode::VarianceUnavailable) {
      throw;
    }
    return out;
  }
  const double z = normal_quantile(1.0 - alpha / 2.0);
  const double half =
      z * std::sqrt(*out.sigma2) * out.l.d_hat / std::sqrt(static_cast<double>(k));
  out.ci = ConfidenceInterval{out.l.total - half, out.l.total + half};
  return out;
}

}  // namespace tailcouple
