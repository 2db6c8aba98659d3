#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "fixtures.hpp"
#include "tailcouple/error.hpp"
#include "tailcouple/sim_lab.hpp"

using namespace tailcouple;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

MeasureSpec spec(Distortion d) { return MeasureSpec{d, Transform::identity(), d.describe()}; }

double ks_distance(const DistributionModel& m, const Sample& s) {
  const auto v = s.values();
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = m.cdf(v[i]);
    d = std::max({d, std::abs(f - static_cast<double>(i) / n),
                  std::abs(static_cast<double>(i + 1) / n - f)});
  }
  return d;
}

}  // namespace

TEST_CASE("model parameters", "[sim_lab]") {
  const auto burr = DistributionModel::burr(2.0, 0.8);
  CHECK_THAT(burr.gamma(), WithinRel(0.625, 1e-15));
  REQUIRE(burr.omega());
  CHECK(*burr.omega() == -0.5);
  CHECK(*DistributionModel::frechet(0.75).omega() == -1.0);
  CHECK_FALSE(DistributionModel::pareto(0.6).omega());
  CHECK_THROWS_AS(DistributionModel::pareto(1.0), Error);
  CHECK_THROWS_AS(DistributionModel::burr(1.0, 1.0), Error);
  CHECK_THROWS_AS(DistributionModel::frechet(0.0), Error);
  CHECK(burr.describe() == "burr:lambda=2,tau=0.8");
}

TEST_CASE("quantile and cdf are inverse", "[sim_lab][property]") {
  for (const auto& m : {DistributionModel::pareto(0.6), DistributionModel::burr(2.0, 0.8),
                        DistributionModel::frechet(0.75)}) {
    for (int i = 1; i < 1000; ++i) {
      const double s = i / 1000.0;
      REQUIRE_THAT(m.cdf(m.quantile(s)), WithinAbs(s, 1e-12));
      REQUIRE_THAT(m.upper_quantile(1.0 - s), WithinRel(m.quantile(s), 1e-9));
    }
    CHECK(std::isfinite(m.upper_quantile(1e-300)));
  }
  CHECK_THAT(DistributionModel::pareto(0.6).quantile(0.5), WithinRel(1.5157165665103981, 1e-14));
}

TEST_CASE("inverse transform sampling passes a KS check", "[sim_lab][mc]") {
  const std::size_t n = 100000;
  for (const auto& m : {DistributionModel::pareto(0.6), DistributionModel::burr(2.0, 1.0),
                        DistributionModel::burr(2.0, 0.8), DistributionModel::frechet(0.75)}) {
    const Sample s = sample_from(m, n, 2026);
    INFO(m.describe());
    CHECK(ks_distance(m, s) < 1.63 / std::sqrt(static_cast<double>(n)));
    CHECK(s.values().front() > 0.0);
  }
}

TEST_CASE("sampling is deterministic", "[sim_lab]") {
  const auto m = DistributionModel::pareto(0.6);
  CHECK(sample_from(m, 1000, 42) == sample_from(m, 1000, 42));
  CHECK_FALSE(sample_from(m, 1000, 42) == sample_from(m, 1000, 43));
  CHECK(replicate_sample(m, 500, 1, 7) == replicate_sample(m, 500, 1, 7));
  for (double x : sample_from(m, 1000, 1).values()) CHECK(x >= 1.0);
}

TEST_CASE("Pareto sample median", "[sim_lab][mc]") {
  const Sample s = sample_from(DistributionModel::pareto(0.6), 100000, 5);
  CHECK(fixtures::rel_err(s.empirical_quantile(0.5), 1.5157165665103981) < 0.02);
}

TEST_CASE("true values", "[sim_lab]") {
  const auto p6 = DistributionModel::pareto(0.6);
  CHECK_THAT(true_value(p6, spec(Distortion::identity())), WithinRel(2.5, 1e-15));
  CHECK_THAT(true_value(p6, spec(Distortion::pht(1.2))), WithinRel(1.0 / 0.28, 1e-14));
  CHECK_THAT(true_value(DistributionModel::pareto(0.75), spec(Distortion::cte(0.9))),
             WithinRel(22.493653007613963, 1e-13));
  CHECK_THAT(true_value(p6, spec(Distortion::cte(0.5)), spec(Distortion::identity()),
                        Coupling::zenga(0.5)),
             WithinRel(0.31950791077289426, 1e-13));

  CHECK_THAT(true_value(DistributionModel::burr(2.0, 0.8), spec(Distortion::identity())),
             WithinRel(1.3884009181744895, 1e-10));
  const auto f = DistributionModel::frechet(0.75);
  CHECK_THAT(true_value(f, spec(Distortion::identity())), WithinRel(3.6256099082219083, 1e-10));
  CHECK_THAT(true_value(f, spec(Distortion::cte(0.9))), WithinRel(22.322722783315230, 1e-10));

  // Power transform on Pareto keeps the closed form with gamma * beta.
  CHECK_THAT(true_value(DistributionModel::pareto(0.3),
                        MeasureSpec{Distortion::identity(), Transform::power(2.0), "m2"}),
             WithinRel(1.0 / 0.4, 1e-14));

  CHECK_THROWS_MATCHES(true_value(p6, spec(Distortion::pht(2.0))), Error,
                       Catch::Matchers::Predicate<Error>(
                           [](const Error& e) { return e.code() == ErrorCode::TailDivergence; }));
  CHECK_THROWS_AS(true_value(p6, spec(Distortion::custom([](double s) { return s; }, 1.0))), Error);
}

TEST_CASE("PHT with rho 1 has the mean as true value", "[sim_lab]") {
  for (const auto& m : {DistributionModel::pareto(0.6), DistributionModel::burr(2.0, 0.8),
                        DistributionModel::burr(3.0, 1.0), DistributionModel::frechet(0.75)}) {
    CHECK(true_value(m, spec(Distortion::pht(1.0))) == true_value(m, spec(Distortion::identity())));
  }
}

TEST_CASE("experiment runner", "[sim_lab][mc]") {
  const auto m = DistributionModel::pareto(0.6);
  ExperimentConfig cfg{spec(Distortion::identity()), std::nullopt, Coupling::first(),
                       KPolicy::default_policy(), std::nullopt, {}};
  const auto a = run_experiment(m, cfg, 2000, 50, 99);
  const auto b = run_experiment(m, cfg, 2000, 50, 99);
  CHECK(a.failures == 0);
  CHECK(a.failure_fraction == 0.0);
  CHECK(a.rmse >= std::abs(a.bias));
  CHECK(a.ci_coverage >= 0.0);
  CHECK(a.ci_coverage <= 1.0);
  CHECK(a.ci_coverage_all <= a.ci_coverage);
  CHECK(a.bias == b.bias);
  CHECK(a.rmse == b.rmse);
  CHECK(a.ci_coverage == b.ci_coverage);
  CHECK(a.gamma_hat1.mean == b.gamma_hat1.mean);
  CHECK(a.mean_k == 30.0);
  CHECK_THROWS_AS(run_experiment(m, cfg, 2000, 49, 99), Error);

  ExperimentConfig fixed = cfg;
  fixed.fixed_k = 40;
  CHECK(run_experiment(m, fixed, 2000, 50, 99).mean_k == 40.0);
}

TEST_CASE("replicates that diverge are counted, not fatal", "[sim_lab][mc]") {
  // PHT(1.6) needs gamma_hat < 0.625, which a Pareto(0.6) sample often violates.
  const auto m = DistributionModel::pareto(0.6);
  ExperimentConfig cfg{spec(Distortion::pht(1.6)), std::nullopt, Coupling::first(),
                       KPolicy::default_policy(), std::nullopt, {}};
  const auto r = run_experiment(m, cfg, 2000, 100, 4);
  CHECK(r.failures > 0);
  CHECK(r.failures < 100);
  CHECK_THAT(r.failure_fraction, WithinAbs(r.failures / 100.0, 1e-15));
}

TEST_CASE("Hill on Burr samples", "[sim_lab][mc]") {
  for (double tau : {1.0, 0.8}) {
    const auto m = DistributionModel::burr(2.0, tau);
    ExperimentConfig cfg{spec(Distortion::identity()), std::nullopt, Coupling::first(),
                         KPolicy::default_policy(), std::nullopt, {}};
    const auto r = run_experiment(m, cfg, 10000, 200, 12);
    INFO("tau " << tau << " mean gamma_hat " << r.gamma_hat1.mean);
    CHECK(std::abs(r.gamma_hat1.mean - m.gamma()) < 0.07);
  }
}

TEST_CASE("PHT bias shrinks with n on Pareto", "[sim_lab][mc]") {
  const auto m = DistributionModel::pareto(0.6);
  ExperimentConfig cfg{spec(Distortion::pht(1.2)), std::nullopt, Coupling::first(),
                       KPolicy::default_policy(), std::nullopt, {}};
  double prev = 1e300;
  for (std::size_t n : {1000u, 10000u, 100000u}) {
    const auto r = run_experiment(m, cfg, n, 400, 77);
    const double rel = std::abs(r.bias) / 2.5;
    INFO("n " << n << " |bias|/2.5 " << rel);
    CHECK(rel < prev);
    prev = rel;
  }
}

TEST_CASE("second-order diagnostic", "[sim_lab]") {
  const std::vector<double> eps{1e-2, 1e-3, 1e-4};
  for (const auto& row : second_order_diagnostic(DistributionModel::pareto(0.6), eps)) {
    CHECK(row.max_abs_excess < 1e-12);
    CHECK(row.a_value == 0.0);
  }
  for (const auto& m : {DistributionModel::burr(2.0, 1.0), DistributionModel::burr(2.0, 0.8),
                        DistributionModel::frechet(0.75)}) {
    const auto rows = second_order_diagnostic(m, eps);
    REQUIRE(rows.size() == 3);
    INFO(m.describe());
    CHECK(rows[0].max_rel_deviation > rows[1].max_rel_deviation);
    CHECK(rows[1].max_rel_deviation > rows[2].max_rel_deviation);
    CHECK(rows[2].max_rel_deviation < 0.05);
    CHECK(rows[0].max_abs_excess > rows[2].max_abs_excess);
  }
}
