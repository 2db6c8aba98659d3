#include "tailcouple/bridge.hpp"

#include <cmath>
#include <string>

#include "tailcouple/error.hpp"
#include "tailcouple/rng.hpp"

namespace tailcouple {

namespace {

double beta_of(const W1Index& w) { return 1.0 / w.rho - w.gamma; }

void require_positive_beta(const W1Index& w) {
  if (!(beta_of(w) > 0.0)) {
    throw Error(ErrorCode::TailDivergence,
                "W1 needs 1/rho - gamma > 0 (gamma=" + std::to_string(w.gamma) +
                    ", rho=" + std::to_string(w.rho) + ")");
  }
}

// int_u^1 y^p dy
double power_integral(double p, double u) {
  if (p == -1.0) return -std::log(u);
  return -std::expm1((p + 1.0) * std::log(u)) / (p + 1.0);
}

// (1 - u^b) / b
double one_minus_pow_over(double b, double u) {
  return -std::expm1(b * std::log(u)) / b;
}

double var1_pht(double g, double r) {
  const double g2 = g * g;
  const double num = g2 * r * r - 2.0 * g2 * r * r * r + 4.0 * g * r * r -
                     2.0 * g * r + r * r - 2.0 * r + 1.0;
  return g2 * num / ((g * r - 1.0) * (g * r - 1.0)) +
         2.0 * g2 * (r + g * r - 1.0) / (r + 2.0 * g * r - 2.0);
}

double var2_cte(double g) {
  return std::pow(g, 4) / ((1.0 - g) * (1.0 - g) * (2.0 * g - 1.0));
}

}  // namespace

EllCoefficients ell_coefficients(const Distortion& d, double gamma) {
  EllCoefficients e;
  e.gamma = gamma;
  switch (d.kind()) {
    case Distortion::Kind::Identity:
    case Distortion::Kind::PHT: {
      const double rho = d.kind() == Distortion::Kind::PHT ? d.rho() : 1.0;
      const double b = 1.0 / rho - gamma;
      if (!(b > 0.0)) {
        throw Error(ErrorCode::TailDivergence, "ell coefficients need rho * gamma < 1");
      }
      e.rho_eff = rho;
      e.a1 = -b;
      e.a2 = -gamma * (1.0 - 1.0 / b);
      e.a3 = -gamma / b;
      return e;
    }
    case Distortion::Kind::CTE: {
      if (!(gamma < 1.0)) {
        throw Error(ErrorCode::TailDivergence, "ell coefficients need gamma < 1");
      }
      e.rho_eff = 1.0;
      e.a1 = -(1.0 - gamma);
      e.a2 = gamma * gamma / (1.0 - gamma);
      e.a3 = -gamma / (1.0 - gamma);
      return e;
    }
    case Distortion::Kind::Custom:
      break;
  }
  throw Error(ErrorCode::VarianceUnavailable,
              "no Brownian-bridge coefficients for custom distortions");
}

WMomentTable w_moment_table(double gamma, double rho) {
  const W1Index w{gamma, rho};
  require_positive_beta(w);
  const double b = beta_of(w);
  if (!(b < 0.5)) {
    throw Error(ErrorCode::VarianceUndefined,
                "E[W1^2] is infinite for 1/rho - gamma >= 1/2");
  }
  WMomentTable t;
  t.e11 = gamma * gamma / ((b - 1.0) * (b - 0.5));
  t.e13 = -gamma / (b - 1.0);
  t.e12 = gamma * rho / (rho + gamma * rho - 1.0);
  t.e12_printed = gamma * rho / (b - 1.0);
  t.e12_var1_consistent = gamma * rho / (1.0 + gamma - 1.0 / rho);
  return t;
}

MomentMatrix::MomentMatrix(std::vector<W1Index> w1)
    : w1_(std::move(w1)), dim_(w1_.size() + 2), m_(dim_ * dim_, 0.0) {}

void MomentMatrix::set(std::size_t i, std::size_t j, double v) {
  m_[i * dim_ + j] = v;
  m_[j * dim_ + i] = v;
}

double MomentMatrix::quadratic_form(std::span<const double> v) const {
  if (v.size() != dim_) {
    throw Error(ErrorCode::ArgumentOutOfRange, "weight vector dimension mismatch");
  }
  double q = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = 0; j < dim_; ++j) q += v[i] * m_[i * dim_ + j] * v[j];
  }
  return q;
}

MomentMatrix limit_moments(std::span<const W1Index> w1) {
  MomentMatrix m({w1.begin(), w1.end()});
  for (std::size_t i = 0; i < w1.size(); ++i) {
    require_positive_beta(w1[i]);
    const double bi = beta_of(w1[i]);
    for (std::size_t j = i; j < w1.size(); ++j) {
      const double bj = beta_of(w1[j]);
      if (!(bi + bj < 1.0)) {
        throw Error(ErrorCode::VarianceUndefined,
                    "W1 second moment is infinite (beta_i + beta_j >= 1)");
      }
      m.set(i, j, w1[i].gamma * w1[j].gamma / (1.0 - bi - bj) *
                      (1.0 / (1.0 - bi) + 1.0 / (1.0 - bj)));
    }
    const double cross = w1[i].gamma / (1.0 - bi);
    m.set(i, m.w2(), cross);
    m.set(i, m.w3(), cross);
  }
  m.set(m.w2(), m.w2(), 1.0);
  m.set(m.w3(), m.w3(), 2.0);
  m.set(m.w2(), m.w3(), 1.0);
  return m;
}

MomentMatrix finite_moments(std::span<const W1Index> w1, double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw Error(ErrorCode::ArgumentOutOfRange, "tail mass must lie in (0, 1)");
  }
  MomentMatrix m({w1.begin(), w1.end()});
  for (std::size_t i = 0; i < w1.size(); ++i) {
    require_positive_beta(w1[i]);
    const double bi = beta_of(w1[i]);
    const double gi = w1[i].gamma;
    for (std::size_t j = i; j < w1.size(); ++j) {
      const double bj = beta_of(w1[j]);
      const double gj = w1[j].gamma;
      // int int_{[u,1]^2} x^(bi-2) y^(bj-2) (min(x,y) - xy) dx dy
      const double joint = power_integral(bi + bj - 2.0, u);
      const double k_min =
          (joint - std::pow(u, bi) * power_integral(bj - 2.0, u)) / bi +
          (joint - std::pow(u, bj) * power_integral(bi - 2.0, u)) / bj;
      const double k_prod = one_minus_pow_over(bi, u) * one_minus_pow_over(bj, u);
      m.set(i, j, gi * gj * std::pow(u, 1.0 - bi - bj) * (k_min - k_prod));
    }
    // Cov(B(1-x), B(1-u)) = u(1-x) for x >= u, and the W3 kernel gives the
    // same integrand, so E[W1 W2] = E[W1 W3] at every u.
    const double cross = gi * std::pow(u, 1.0 - bi) *
                         (power_integral(bi - 2.0, u) - power_integral(bi - 1.0, u));
    m.set(i, m.w2(), cross);
    m.set(i, m.w3(), cross);
  }
  m.set(m.w2(), m.w2(), 1.0 - u);
  m.set(m.w3(), m.w3(), 2.0 - u);
  m.set(m.w2(), m.w3(), 1.0 - u);
  return m;
}

BridgeMoments simulate_bridge_moments(std::span<const W1Index> w1,
                                      const BridgeSimConfig& config) {
  constexpr std::size_t kMinGrid = 10000;
  constexpr std::size_t kMinReps = 1000;
  if (config.grid < kMinGrid) {
    throw Error(ErrorCode::GridTooCoarse, "bridge grid needs at least 1e4 cells");
  }
  if (config.reps < kMinReps) {
    throw Error(ErrorCode::ArgumentOutOfRange, "bridge simulation needs >= 1e3 replicates");
  }
  const double u = config.k_over_n;
  if (!(u > 0.0 && u <= 0.01)) {
    throw Error(ErrorCode::ArgumentOutOfRange, "bridge tail mass must lie in (0, 0.01]");
  }
  for (const auto& w : w1) require_positive_beta(w);

  const std::size_t m = config.grid;
  const std::size_t n_w1 = w1.size();
  const double h = (1.0 - u) / static_cast<double>(m);

  // Body: node weights for B(s_i), from exact cell integrals of the singular
  // weight (1-s)^(beta-2) shared equally between the two cell endpoints.
  std::vector<std::vector<double>> body_w(n_w1, std::vector<double>(m + 1, 0.0));
  std::vector<double> body_s(n_w1, 0.0);  // sum_i w_i s_i, for the -s W(1) part
  for (std::size_t c = 0; c < n_w1; ++c) {
    const double b = beta_of(w1[c]);
    const double scale = w1[c].gamma * std::pow(u, 0.5 - b);
    for (std::size_t i = 0; i < m; ++i) {
      const double x0 = 1.0 - static_cast<double>(i) * h;
      const double x1 = (i + 1 == m) ? u : 1.0 - static_cast<double>(i + 1) * h;
      const double cell = scale * (std::pow(x1, b - 1.0) - std::pow(x0, b - 1.0)) /
                          (1.0 - b);
      body_w[c][i] += 0.5 * cell;
      body_w[c][i + 1] += 0.5 * cell;
    }
    for (std::size_t i = 0; i <= m; ++i) {
      const double s = (i == m) ? 1.0 - u : static_cast<double>(i) * h;
      body_s[c] += body_w[c][i] * s;
    }
  }

  // Tail: x_j = u r^j down to x_min; the cell weight of dx/x is log(1/r).
  const std::size_t n_tail = std::max<std::size_t>(2000, m / 10);
  const double log_span = std::log(1e10);
  const double dlog = log_span / static_cast<double>(n_tail);
  std::vector<double> tail_x(n_tail + 1);
  std::vector<double> tail_w(n_tail + 1, 0.0);
  for (std::size_t j = 0; j <= n_tail; ++j) {
    tail_x[j] = u * std::exp(-dlog * static_cast<double>(j));
    if (j > 0) {
      tail_w[j - 1] += 0.5 * dlog;
      tail_w[j] += 0.5 * dlog;
    }
  }
  // [0, x_min]: B interpolated linearly to B(1) = 0 integrates to B(1-x_min).
  tail_w[n_tail] += 1.0;
  const double root_inv_u = 1.0 / std::sqrt(u);
  double tail_s = 0.0;
  for (std::size_t j = 0; j <= n_tail; ++j) tail_s += tail_w[j] * (1.0 - tail_x[j]);

  const std::size_t dim = n_w1 + 2;
  std::vector<double> sum(dim * dim, 0.0);
  std::vector<double> sum_sq(dim * dim, 0.0);
  std::vector<double> acc(n_w1);
  std::vector<double> x(dim);

  for (std::size_t rep = 0; rep < config.reps; ++rep) {
    Rng rng(derive_seed(config.seed, rep));
    const double root_h = std::sqrt(h);
    double w = 0.0;
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t i = 1; i <= m; ++i) {
      w += root_h * rng.normal();
      for (std::size_t c = 0; c < n_w1; ++c) acc[c] += body_w[c][i] * w;
    }
    const double w_at_boundary = w;  // W(1 - u)
    double tail_acc = tail_w[0] * w;
    for (std::size_t j = 1; j <= n_tail; ++j) {
      w += std::sqrt(tail_x[j - 1] - tail_x[j]) * rng.normal();
      tail_acc += tail_w[j] * w;
    }
    const double w_one = w + std::sqrt(tail_x[n_tail]) * rng.normal();

    for (std::size_t c = 0; c < n_w1; ++c) x[c] = acc[c] - w_one * body_s[c];
    x[n_w1] = root_inv_u * (w_at_boundary - (1.0 - u) * w_one);
    x[n_w1 + 1] = root_inv_u * (tail_acc - w_one * tail_s);

    for (std::size_t a = 0; a < dim; ++a) {
      for (std::size_t b = a; b < dim; ++b) {
        const double p = x[a] * x[b];
        sum[a * dim + b] += p;
        sum_sq[a * dim + b] += p * p;
      }
    }
  }

  BridgeMoments out{MomentMatrix({w1.begin(), w1.end()}),
                    MomentMatrix({w1.begin(), w1.end()}), config};
  const double r = static_cast<double>(config.reps);
  for (std::size_t a = 0; a < dim; ++a) {
    for (std::size_t b = a; b < dim; ++b) {
      const double mean = sum[a * dim + b] / r;
      const double var = std::max(0.0, sum_sq[a * dim + b] / r - mean * mean);
      out.mean.set(a, b, mean);
      out.stderr_.set(a, b, std::sqrt(var / (r - 1.0)));
    }
  }
  return out;
}

double AsymptoticVariance::relative_gap() const {
  return (quadratic_form - closed_form) / closed_form;
}

AsymptoticVariance asymptotic_variance(const Distortion& d, double gamma) {
  const EllCoefficients e = ell_coefficients(d, gamma);
  const WMomentTable t = w_moment_table(gamma, e.rho_eff);

  AsymptoticVariance out;
  if (d.kind() == Distortion::Kind::CTE) {
    if (!(gamma > 0.5)) {
      throw Error(ErrorCode::VarianceUndefined, "CTE variance needs gamma > 1/2");
    }
    out.closed_form = var2_cte(gamma);
  } else {
    out.closed_form = var1_pht(gamma, e.rho_eff);
  }
  out.quadratic_form = e.a1 * e.a1 * t.e11 + e.a2 * e.a2 * t.e22 +
                       e.a3 * e.a3 * t.e33 + 2.0 * e.a1 * e.a2 * t.e12 +
                       2.0 * e.a1 * e.a3 * t.e13 + 2.0 * e.a2 * e.a3 * t.e23;
  return out;
}

double variance_coupled(const EllCoefficients& first,
                        const EllCoefficients& second, double delta,
                        const Partials& partials, const VarianceMode& mode) {
  if (!(delta >= 0.0 && delta <= 1.0)) {
    throw Error(ErrorCode::ArgumentOutOfRange, "delta must lie in [0, 1]");
  }
  const double c1 = delta * partials.hx;
  const double c2 = (1.0 - delta) * partials.hy;

  std::vector<W1Index> basis;
  std::vector<double> w1_weight;
  auto add_w1 = [&](const EllCoefficients& e, double c) {
    const W1Index idx{e.gamma, e.rho_eff};
    for (std::size_t i = 0; i < basis.size(); ++i) {
      if (basis[i] == idx) {
        w1_weight[i] += c * e.a1;
        return;
      }
    }
    basis.push_back(idx);
    w1_weight.push_back(c * e.a1);
  };
  double a2 = 0.0;
  double a3 = 0.0;
  if (c1 != 0.0) {
    add_w1(first, c1);
    a2 += c1 * first.a2;
    a3 += c1 * first.a3;
  }
  if (c2 != 0.0) {
    add_w1(second, c2);
    a2 += c2 * second.a2;
    a3 += c2 * second.a3;
  }
  if (basis.empty()) return 0.0;

  std::vector<double> v = w1_weight;
  v.push_back(a2);
  v.push_back(a3);

  switch (mode.kind) {
    case VarianceMode::Kind::ClosedForm: {
      if (basis.size() != 1) {
        throw Error(ErrorCode::VarianceUnavailable,
                    "closed-form variance needs both measures to share W1 "
                    "(same gamma and rho); use kernel-limit or bridge simulation");
      }
      const WMomentTable t = w_moment_table(basis[0].gamma, basis[0].rho);
      MomentMatrix mm(basis);
      mm.set(0, 0, t.e11);
      mm.set(0, 1, t.e12);
      mm.set(0, 2, t.e13);
      mm.set(1, 1, t.e22);
      mm.set(2, 2, t.e33);
      mm.set(1, 2, t.e23);
      return mm.quadratic_form(v);
    }
    case VarianceMode::Kind::KernelLimit:
      return limit_moments(basis).quadratic_form(v);
    case VarianceMode::Kind::BridgeSim:
      return simulate_bridge_moments(basis, mode.sim).mean.quadratic_form(v);
  }
  return 0.0;
}

}  // namespace tailcouple
