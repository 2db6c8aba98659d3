#include "tailcouple/sim_lab.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "tailcouple/error.hpp"
#include "tailcouple/format.hpp"
#include "tailcouple/quadrature.hpp"
#include "tailcouple/rng.hpp"

namespace tailcouple {

namespace {

void check_gamma(double g) {
  if (!(g > 0.0 && g < 1.0)) {
    throw Error(ErrorCode::ArgumentOutOfRange, "model tail index must lie in (0, 1)");
  }
}

// Tail index of H(Q) for the transforms whose index is known.
std::optional<double> transformed_gamma(const DistributionModel& m, const Transform& h) {
  switch (h.kind()) {
    case Transform::Kind::Identity: return m.gamma();
    case Transform::Kind::Power: return m.gamma() * h.beta();
    case Transform::Kind::Custom: return std::nullopt;
  }
  return std::nullopt;
}

Summary summarize(const std::vector<double>& xs) {
  Summary s;
  if (xs.empty()) {
    s.mean = s.sd = s.min = s.max = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.sd = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  s.min = *lo;
  s.max = *hi;
  return s;
}

double median(std::vector<double> xs) {
  if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(xs.begin(), xs.end());
  const auto m = xs.size() / 2;
  return xs.size() % 2 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
}

}  // namespace

DistributionModel::DistributionModel(Kind kind, double a, double b)
    : kind_(kind), a_(a), b_(b) {
  switch (kind) {
    case Kind::Pareto:
      gamma_ = a;
      break;
    case Kind::Burr:
      gamma_ = 1.0 / (a * b);
      omega_ = -1.0 / a;
      break;
    case Kind::Frechet:
      gamma_ = a;
      omega_ = -1.0;
      break;
  }
  check_gamma(gamma_);
}

DistributionModel DistributionModel::pareto(double gamma) {
  return DistributionModel(Kind::Pareto, gamma, 0.0);
}

DistributionModel DistributionModel::burr(double lambda, double tau) {
  if (!(lambda > 0.0 && tau > 0.0)) {
    throw Error(ErrorCode::ArgumentOutOfRange, "Burr needs lambda, tau > 0");
  }
  return DistributionModel(Kind::Burr, lambda, tau);
}

DistributionModel DistributionModel::frechet(double gamma) {
  return DistributionModel(Kind::Frechet, gamma, 0.0);
}

double DistributionModel::upper_quantile(double v) const {
  switch (kind_) {
    case Kind::Pareto:
      return std::pow(v, -a_);
    case Kind::Burr:
      return std::pow(std::expm1(-std::log(v) / a_), 1.0 / b_);
    case Kind::Frechet:
      return std::pow(-std::log1p(-v), -a_);
  }
  return 0.0;
}

double DistributionModel::quantile(double s) const {
  if (!(s > 0.0 && s < 1.0)) {
    throw Error(ErrorCode::ProbabilityOutOfRange, "quantile level must lie in (0, 1)");
  }
  if (kind_ == Kind::Frechet) return std::pow(-std::log(s), -a_);
  return upper_quantile(1.0 - s);
}

double DistributionModel::cdf(double x) const {
  switch (kind_) {
    case Kind::Pareto:
      return x <= 1.0 ? 0.0 : -std::expm1(-std::log(x) / a_);
    case Kind::Burr:
      return x <= 0.0 ? 0.0 : -std::expm1(-a_ * std::log1p(std::pow(x, b_)));
    case Kind::Frechet:
      return x <= 0.0 ? 0.0 : std::exp(-std::pow(x, -1.0 / a_));
  }
  return 0.0;
}

std::string DistributionModel::describe() const {
  switch (kind_) {
    case Kind::Pareto: return "pareto:gamma=" + format_double(a_);
    case Kind::Burr:
      return "burr:lambda=" + format_double(a_) + ",tau=" + format_double(b_);
    case Kind::Frechet: return "frechet:gamma=" + format_double(a_);
  }
  return {};
}

Sample sample_from(const DistributionModel& model, std::size_t n,
                   std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> raw(n);
  // V = 1 - U has the same open-interval law, so Q(U) = Q(1 - V).
  for (auto& x : raw) x = model.upper_quantile(rng.open_uniform());
  return build_sample(raw, model.describe());
}

Sample replicate_sample(const DistributionModel& model, std::size_t n,
                        std::uint64_t seed, std::size_t rep) {
  return sample_from(model, n, derive_seed(seed, rep));
}

double true_value(const DistributionModel& model, const MeasureSpec& spec) {
  const auto gh = transformed_gamma(model, spec.h);
  const Distortion& psi = spec.psi;
  if (gh) {
    const double g = *gh;
    const bool diverges =
        (psi.kind() == Distortion::Kind::PHT) ? psi.rho() * g >= 1.0 : g >= 1.0;
    if (diverges && psi.kind() != Distortion::Kind::Custom) {
      throw Error(ErrorCode::TailDivergence, "true value is infinite for this tail");
    }
  }
  if (model.kind() == DistributionModel::Kind::Pareto && gh) {
    const double g = *gh;
    switch (psi.kind()) {
      case Distortion::Kind::Identity: return 1.0 / (1.0 - g);
      case Distortion::Kind::PHT: return 1.0 / (1.0 - psi.rho() * g);
      case Distortion::Kind::CTE: return std::pow(1.0 - psi.t(), -g) / (1.0 - g);
      case Distortion::Kind::Custom: break;
    }
  }

  // Quadrature in tail mass v = 1 - s: int_0^1 H(Q(1-v)) Psi'(1-v) dv.
  double v_max = 1.0;
  std::function<double(double)> density;
  switch (psi.kind()) {
    case Distortion::Kind::Identity:
      density = [](double) { return 1.0; };
      break;
    case Distortion::Kind::PHT: {
      const double p = 1.0 / psi.rho();
      density = [p](double v) { return p * std::pow(v, p - 1.0); };
      break;
    }
    case Distortion::Kind::CTE: {
      const double t = psi.t();
      v_max = 1.0 - t;
      density = [t](double) { return 1.0 / (1.0 - t); };
      break;
    }
    case Distortion::Kind::Custom:
      throw Error(ErrorCode::InvalidConfig,
                  "true values are only available for built-in distortions");
  }
  const double value = quad::integrate_near_zero(
      [&](double v) { return spec.h(model.upper_quantile(v)) * density(v); }, v_max);
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::TailDivergence, "true value is infinite for this tail");
  }
  return value;
}

double true_value(const DistributionModel& model, const MeasureSpec& spec1,
                  const std::optional<MeasureSpec>& spec2,
                  const Coupling& coupling) {
  const double x = true_value(model, spec1);
  if (coupling.kind() == Coupling::Kind::First) return x;
  if (!spec2) {
    throw Error(ErrorCode::InvalidConfig, "coupling needs a second measure");
  }
  return couple_eval(coupling, x, true_value(model, *spec2)).value;
}

ExperimentReport run_experiment(const DistributionModel& model,
                                const ExperimentConfig& config, std::size_t n,
                                std::size_t replicates, std::uint64_t seed) {
  if (replicates < 50) {
    throw Error(ErrorCode::InvalidConfig, "experiments need at least 50 replicates");
  }
  ExperimentReport r;
  r.model = model.describe();
  r.measure1 = config.spec1.label;
  r.measure2 = config.spec2 ? config.spec2->label : std::string{};
  r.coupling = config.coupling.describe();
  r.alpha = config.options.alpha;
  r.n = n;
  r.seed = seed;
  r.replicates = replicates;
  r.true_value = true_value(model, config.spec1, config.spec2, config.coupling);

  std::vector<double> points;
  std::vector<double> rel_errors;
  std::vector<double> g1;
  std::vector<double> g2;
  std::size_t covered = 0;
  double width_sum = 0.0;
  double k_sum = 0.0;
  points.reserve(replicates);

  for (std::size_t rep = 0; rep < replicates; ++rep) {
    try {
      const Sample s = replicate_sample(model, n, seed, rep);
      const std::size_t k =
          config.fixed_k ? *config.fixed_k : select_k(s, config.k_policy, config.spec1.h);
      const auto est = estimate_coupled(s, config.spec1, config.spec2,
                                        config.coupling, k, config.options);
      points.push_back(est.point);
      rel_errors.push_back(std::abs(est.point - r.true_value) / std::abs(r.true_value));
      g1.push_back(est.l1.fit.gamma_hat);
      if (est.l2) g2.push_back(est.l2->fit.gamma_hat);
      k_sum += static_cast<double>(k);
      if (est.ci) {
        ++r.ci_count;
        width_sum += est.ci->hi - est.ci->lo;
        if (est.ci->lo <= r.true_value && r.true_value <= est.ci->hi) ++covered;
      }
    } catch (const Error&) {
      ++r.failures;
    }
  }

  const auto ok = points.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  r.failure_fraction = static_cast<double>(r.failures) / static_cast<double>(replicates);
  if (ok > 0) {
    double sum = 0.0;
    double sq = 0.0;
    for (double p : points) {
      sum += p - r.true_value;
      sq += (p - r.true_value) * (p - r.true_value);
    }
    r.bias = sum / static_cast<double>(ok);
    r.mean_point = r.true_value + r.bias;
    r.rmse = std::sqrt(sq / static_cast<double>(ok));
    r.median_abs_rel_error = median(rel_errors);
    r.mean_k = k_sum / static_cast<double>(ok);
    r.ci_coverage_all = static_cast<double>(covered) / static_cast<double>(ok);
  } else {
    r.bias = r.mean_point = r.rmse = r.median_abs_rel_error = r.mean_k = nan;
    r.ci_coverage_all = nan;
  }
  r.ci_coverage = r.ci_count ? static_cast<double>(covered) / static_cast<double>(r.ci_count) : nan;
  r.mean_ci_width = r.ci_count ? width_sum / static_cast<double>(r.ci_count) : nan;
  r.gamma_hat1 = summarize(g1);
  if (!g2.empty()) r.gamma_hat2 = summarize(g2);
  return r;
}

std::vector<SecondOrderRow> second_order_diagnostic(
    const DistributionModel& model, const std::vector<double>& epsilons,
    const Transform& h) {
  static const std::vector<double> s_grid = {0.1, 0.25, 0.5, 0.75, 1.25, 1.5, 2.0, 4.0};
  const auto gh = transformed_gamma(model, h);
  if (!gh) {
    throw Error(ErrorCode::InvalidConfig, "diagnostic needs a known transformed tail index");
  }
  for (double e : epsilons) {
    if (!(e > 0.0 && e * s_grid.back() < 1.0)) {
      throw Error(ErrorCode::ArgumentOutOfRange, "epsilon outside (0, 1/4)");
    }
  }
  const double g = *gh;

  auto excess = [&](double eps) {
    std::vector<double> out;
    const double base = h(model.upper_quantile(eps));
    for (double s : s_grid) {
      out.push_back(h(model.upper_quantile(eps * s)) / base - std::pow(s, -g));
    }
    return out;
  };

  std::vector<SecondOrderRow> rows;
  if (!model.omega()) {
    for (double eps : epsilons) {
      SecondOrderRow row;
      row.epsilon = eps;
      for (double x : excess(eps)) row.max_abs_excess = std::max(row.max_abs_excess, std::abs(x));
      rows.push_back(row);
    }
    return rows;
  }

  const double omega = *model.omega();
  std::vector<double> target;
  double target_max = 0.0;
  for (double s : s_grid) {
    target.push_back(std::pow(s, -g) * (std::pow(s, -omega) - 1.0) / omega);
    target_max = std::max(target_max, std::abs(target.back()));
  }

  const double eps_min = *std::min_element(epsilons.begin(), epsilons.end());
  const auto ref = excess(eps_min);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < s_grid.size(); ++i) {
    num += ref[i] * target[i];
    den += target[i] * target[i];
  }
  const double c = (num / den) / std::pow(eps_min, -omega);

  for (double eps : epsilons) {
    SecondOrderRow row;
    row.epsilon = eps;
    row.a_value = c * std::pow(eps, -omega);
    const auto ex = excess(eps);
    for (std::size_t i = 0; i < s_grid.size(); ++i) {
      row.max_abs_excess = std::max(row.max_abs_excess, std::abs(ex[i]));
      row.max_rel_deviation = std::max(
          row.max_rel_deviation, std::abs(ex[i] / row.a_value - target[i]) / target_max);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace tailcouple
