#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "fixtures.hpp"
#include "tailcouple/coupled.hpp"
#include "tailcouple/error.hpp"
#include "tailcouple/sim_lab.hpp"

using namespace tailcouple;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

MeasureSpec spec(Distortion d) { return MeasureSpec{d, Transform::identity(), d.describe()}; }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidConfig;
}

bool has_warning(const CoupledEstimate& e, const std::string& w) {
  return std::find(e.warnings.begin(), e.warnings.end(), w) != e.warnings.end();
}

}  // namespace

TEST_CASE("coupling values", "[coupled]") {
  for (double p : {0.1, 0.5, 1.0}) {
    CHECK_THAT(couple_eval(Coupling::zenga(p), 2.7, 2.7).value, WithinAbs(1.0, 1e-15));
  }
  CHECK_THAT(couple_eval(Coupling::zenga(1.0), 4.0, 3.0).value, WithinRel(0.75, 1e-15));
  CHECK_THAT(couple_eval(Coupling::zenga(0.5), 3.7892914162759952, 2.5).value,
             WithinRel(0.31950791077289426, 1e-13));
  CHECK(couple_eval(Coupling::ratio(), 3.0, 2.0).value == 1.5);
  CHECK(couple_eval(Coupling::first(), 3.0, 2.0).value == 3.0);

  const auto r = couple_eval(Coupling::ratio(), 3.0, 2.0);
  CHECK_THAT(r.partials.hx, WithinRel(0.5, 1e-15));
  CHECK_THAT(r.partials.hy, WithinRel(-0.75, 1e-15));

  CHECK(code_of([] { couple_eval(Coupling::ratio(), 1.0, 0.0); }) == ErrorCode::DivisionByZero);
  CHECK(code_of([] { couple_eval(Coupling::zenga(0.5), 0.0, 1.0); }) ==
        ErrorCode::DivisionByZero);
  CHECK_THROWS_AS(Coupling::zenga(0.0), Error);
  CHECK_THROWS_AS(Coupling::zenga(1.5), Error);
}

TEST_CASE("built-in partials match finite differences", "[coupled][property]") {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> xy(0.5, 20.0);
  std::uniform_real_distribution<double> pd(0.05, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double x = xy(gen);
    const double y = xy(gen);
    for (const auto& c : {Coupling::ratio(), Coupling::zenga(pd(gen))}) {
      const auto v = couple_eval(c, x, y);
      const double hx = 1e-6 * x;
      const double hy = 1e-6 * y;
      const double fx = (couple_eval(c, x + hx, y).value - couple_eval(c, x - hx, y).value) / (2 * hx);
      const double fy = (couple_eval(c, x, y + hy).value - couple_eval(c, x, y - hy).value) / (2 * hy);
      INFO(c.describe() << " x=" << x << " y=" << y);
      REQUIRE_THAT(v.partials.hx, WithinRel(fx, 1e-6));
      REQUIRE_THAT(v.partials.hy, WithinRel(fy, 1e-6));
    }
  }
}

TEST_CASE("custom coupling without partials uses finite differences", "[coupled]") {
  const auto c = Coupling::custom([](double x, double y) { return x * x * y; });
  const auto v = couple_eval(c, 2.0, 3.0);
  CHECK(v.value == 12.0);
  CHECK_THAT(v.partials.hx, WithinRel(12.0, 1e-6));
  CHECK_THAT(v.partials.hy, WithinRel(4.0, 1e-6));
}

TEST_CASE("delta weight", "[coupled]") {
  CHECK(delta_weight(1.0, 1.0) == 0.5);
  CHECK(delta_weight(3.0, 0.0) == 1.0);
  CHECK(delta_weight(0.25, 0.75) == 0.25);
  CHECK(code_of([] { delta_weight(0.0, 0.0); }) == ErrorCode::BothZero);
}

TEST_CASE("bias lambda", "[coupled]") {
  const auto mean = ell_coefficients(Distortion::identity(), 0.6);
  CHECK(bias_lambda({}, mean, mean, 0.4, {1.0, 1.0}) == 0.0);
  CHECK_THAT(bias_lambda({0.2, -0.5, 0.0, 0.0}, mean, mean, 1.0, {1.0, 0.0}),
             WithinRel(-0.2 / 0.9, 1e-14));
  // delta = 0 leaves only the second measure's term.
  const double only2 = bias_lambda({5.0, -0.3, 0.2, -0.5}, mean, mean, 0.0, {1.0, 1.0});
  CHECK_THAT(only2, WithinRel(-0.2 / 0.9, 1e-14));
  CHECK(code_of([&] { bias_lambda({0.2, 0.0, 0.0, 0.0}, mean, mean, 1.0, {1.0, 0.0}); }) ==
        ErrorCode::UndefinedBias);
  CHECK(bias_lambda({0.0, 0.0, 0.0, 0.0}, mean, mean, 1.0, {1.0, 0.0}) == 0.0);
  // PHT uses 1/rho in place of 1.
  const auto pht = ell_coefficients(Distortion::pht(1.2), 0.6);
  const double d = -0.5 / (1.0 / 1.2 - 0.6 + 0.5);
  CHECK_THAT(bias_lambda({0.2, -0.5, 0.0, 0.0}, pht, pht, 1.0, {1.0, 0.0}),
             WithinRel(-0.2 * d / -0.5, 1e-14));
}

TEST_CASE("first coupling matches the single-measure interval", "[coupled]") {
  const auto model = DistributionModel::pareto(0.6);
  int with_ci = 0;
  for (std::size_t rep = 0; rep < 40; ++rep) {
    const Sample s = replicate_sample(model, 5000, 21, rep);
    for (const auto& d : {Distortion::identity(), Distortion::pht(1.1), Distortion::cte(0.9)}) {
      const auto c = estimate_coupled(s, spec(d), spec(Distortion::identity()), Coupling::first(), 60);
      const auto single = estimate_single(s, spec(d), 60);
      CHECK(c.point == c.l1.total);
      CHECK(c.delta_hat == 1.0);
      REQUIRE(c.ci.has_value() == single.ci.has_value());
      if (c.ci) {
        ++with_ci;
        CHECK_THAT(c.ci->lo, WithinAbs(single.ci->lo, 1e-12 * std::abs(single.ci->lo)));
        CHECK_THAT(c.ci->hi, WithinAbs(single.ci->hi, 1e-12 * std::abs(single.ci->hi)));
        CHECK_THAT(0.5 * (c.ci->lo + c.ci->hi), WithinRel(c.point, 1e-12));
      }
    }
  }
  CHECK(with_ci > 60);
}

TEST_CASE("ratio of a measure with itself", "[coupled]") {
  const Sample s = replicate_sample(DistributionModel::pareto(0.6), 3000, 5, 0);
  for (const auto& d : {Distortion::identity(), Distortion::cte(0.8), Distortion::pht(1.1)}) {
    const auto e = estimate_coupled(s, spec(d), spec(d), Coupling::ratio(), 40);
    CHECK(e.point == 1.0);
    if (e.sigma2) CHECK_THAT(*e.sigma2, WithinAbs(0.0, 1e-12));
  }
}

TEST_CASE("homogeneity under rescaling", "[coupled][property]") {
  const auto model = DistributionModel::pareto(0.65);
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> cd(-3.0, 3.0);
  for (std::size_t rep = 0; rep < 50; ++rep) {
    const Sample s = replicate_sample(model, 2000, 9, rep);
    const double c = std::exp(cd(gen));
    std::vector<double> v(s.values().begin(), s.values().end());
    for (auto& x : v) x *= c;
    const Sample t = build_sample(v);
    const auto a = estimate_coupled(s, spec(Distortion::cte(0.9)), spec(Distortion::identity()),
                                    Coupling::ratio(), 45);
    const auto b = estimate_coupled(t, spec(Distortion::cte(0.9)), spec(Distortion::identity()),
                                    Coupling::ratio(), 45);
    REQUIRE_THAT(b.point, WithinRel(a.point, 1e-12));
    // gamma_hat is scale free, so a divergent tail diverges on both samples.
    const auto first_on = [](const Sample& x) {
      return estimate_coupled(x, spec(Distortion::pht(1.2)), std::nullopt, Coupling::first(), 45);
    };
    const auto outcome = [&](const Sample& x) -> std::optional<ErrorCode> {
      try {
        first_on(x);
      } catch (const Error& e) {
        return e.code();
      }
      return std::nullopt;
    };
    const auto c1 = outcome(s);
    REQUIRE(outcome(t) == c1);
    if (!c1) REQUIRE_THAT(first_on(t).point, WithinRel(c * first_on(s).point, 1e-12));
  }
}

TEST_CASE("half width scale follows k^(1/2 - gamma)", "[coupled][property]") {
  // D grows like k^(1-gamma) on a Pareto tail, so w = D/sqrt(k) shrinks like
  // k^(1/2-gamma) rather than k^(-1/2).
  for (double g : {0.55, 0.6, 0.75}) {
    const Sample s = fixtures::pareto_grid(40000, g);
    const auto a = estimate_coupled(s, spec(Distortion::identity()), std::nullopt, Coupling::first(), 200);
    const auto b = estimate_coupled(s, spec(Distortion::identity()), std::nullopt, Coupling::first(), 400);
    INFO("gamma " << g);
    CHECK_THAT(b.half_width_scale / a.half_width_scale, WithinRel(std::pow(2.0, 0.5 - g), 0.02));
    CHECK_THAT((b.half_width_scale / b.l1.d_hat) / (a.half_width_scale / a.l1.d_hat),
               WithinRel(1.0 / std::sqrt(2.0), 1e-14));
  }
}

TEST_CASE("without bias inputs the point is the interval midpoint", "[coupled]") {
  const Sample s = replicate_sample(DistributionModel::pareto(0.7), 4000, 2, 1);
  const auto e = estimate_coupled(s, spec(Distortion::cte(0.9)), spec(Distortion::identity()),
                                  Coupling::zenga(0.5), 50);
  CHECK(e.lambda == 0.0);
  REQUIRE(e.ci);
  CHECK_THAT(0.5 * (e.ci->lo + e.ci->hi), WithinRel(e.point, 1e-12));

  EstimateOptions biased;
  biased.bias = BiasInputs{0.3, -0.5, 0.3, -0.5};
  const auto eb = estimate_coupled(s, spec(Distortion::cte(0.9)), spec(Distortion::identity()),
                                   Coupling::zenga(0.5), 50, biased);
  CHECK(eb.point == e.point);
  REQUIRE(eb.ci);
  CHECK_THAT(0.5 * (eb.ci->lo + eb.ci->hi), WithinRel(e.point - eb.lambda * eb.half_width_scale, 1e-12));
}

TEST_CASE("Zenga point settles near the true value", "[coupled][mc]") {
  const auto model = DistributionModel::pareto(0.6);
  std::vector<double> points;
  for (std::size_t rep = 0; rep < 300; ++rep) {
    const Sample s = replicate_sample(model, 10000, 30, rep);
    points.push_back(estimate_coupled(s, spec(Distortion::cte(0.5)), spec(Distortion::identity()),
                                      Coupling::zenga(0.5), 63)
                         .point);
  }
  std::nth_element(points.begin(), points.begin() + 150, points.end());
  CHECK(std::abs(points[150] - 0.31950791077289426) < 0.1);
}

TEST_CASE("warnings and suppressed intervals", "[coupled]") {
  // Light-tailed grid: gamma_hat well below 1/2.
  const Sample s = fixtures::pareto_grid(2000, 0.3);
  const auto e = estimate_coupled(s, spec(Distortion::identity()), std::nullopt, Coupling::first(), 50);
  CHECK(has_warning(e, "gamma_out_of_theory_range:measure1"));
  CHECK(has_warning(e, "ci_suppressed"));
  CHECK_FALSE(e.ci);

  std::vector<double> tied(100, 1.0);
  for (std::size_t i = 90; i < 100; ++i) tied[i] = 5.0;
  const auto t = estimate_coupled(build_sample(tied), spec(Distortion::identity()), std::nullopt,
                                  Coupling::first(), 5);
  CHECK(has_warning(t, "degenerate_tail:measure1"));
  CHECK(has_warning(t, "tied_top_values:measure1"));

  const Sample h = fixtures::pareto_grid(2000, 0.6);
  const auto p = estimate_coupled(h, spec(Distortion::pht(1.2)), std::nullopt, Coupling::first(), 50);
  CHECK(has_warning(p, "pht_variance_formula_differs_from_kernel"));

  const auto mixed = estimate_coupled(h, spec(Distortion::pht(1.2)), spec(Distortion::identity()),
                                      Coupling::ratio(), 50);
  CHECK(mixed.sigma2);
  EstimateOptions closed;
  closed.variance_mode = VarianceMode::closed_form();
  const auto mixed_closed = estimate_coupled(h, spec(Distortion::pht(1.2)),
                                             spec(Distortion::identity()), Coupling::ratio(), 50, closed);
  CHECK_FALSE(mixed_closed.sigma2);
  CHECK(has_warning(mixed_closed, "variance_unavailable"));
  CHECK_FALSE(mixed_closed.ci);

  const auto custom = Distortion::custom([](double x) { return x * x; }, 2.0);
  const auto c = estimate_coupled(h, MeasureSpec{custom, Transform::identity(), "sq"}, std::nullopt,
                                  Coupling::first(), 50);
  CHECK(has_warning(c, "variance_unavailable:measure1"));
  CHECK_FALSE(c.ci);
}

TEST_CASE("argument errors", "[coupled]") {
  const Sample h = fixtures::pareto_grid(500, 0.6);
  CHECK(code_of([&] {
          estimate_coupled(h, spec(Distortion::identity()), std::nullopt, Coupling::ratio(), 20);
        }) == ErrorCode::InvalidConfig);
  EstimateOptions bad;
  bad.alpha = 1.0;
  CHECK(code_of([&] {
          estimate_coupled(h, spec(Distortion::identity()), std::nullopt, Coupling::first(), 20, bad);
        }) == ErrorCode::InvalidConfig);
  CHECK(code_of([&] {
          estimate_coupled(h, spec(Distortion::pht(2.0)), std::nullopt, Coupling::first(), 20);
        }) == ErrorCode::TailDivergence);
}
