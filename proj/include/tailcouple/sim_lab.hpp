#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tailcouple/coupled.hpp"
#include "tailcouple/measure.hpp"
#include "tailcouple/sample.hpp"
#include "tailcouple/tail_fit.hpp"

namespace tailcouple {

/// Heavy-tailed law with known first- and second-order tail behaviour.
///   Pareto(g):      Q(s) = (1-s)^-g, exact power tail (A = 0)
///   Burr(l, t):     Q(s) = ((1-s)^(-1/l) - 1)^(1/t), g = 1/(l t), omega = -1/l
///   Frechet(g):     Q(s) = (-log s)^-g, omega = -1
class DistributionModel {
 public:
  enum class Kind { Pareto, Burr, Frechet };

  static DistributionModel pareto(double gamma);
  static DistributionModel burr(double lambda, double tau);
  static DistributionModel frechet(double gamma);

  Kind kind() const noexcept { return kind_; }
  double gamma() const noexcept { return gamma_; }
  // Empty for Pareto, whose tail has no second-order term.
  std::optional<double> omega() const noexcept { return omega_; }

  double quantile(double s) const;
  // Q(1 - v), evaluated without forming 1 - v.
  double upper_quantile(double v) const;
  double cdf(double x) const;
  std::string describe() const;

 private:
  DistributionModel(Kind kind, double a, double b);
  Kind kind_;
  double a_ = 0.0;
  double b_ = 0.0;
  double gamma_ = 0.0;
  std::optional<double> omega_;
};

// Inverse-transform draw of n values from a generator seeded with `seed`.
Sample sample_from(const DistributionModel& model, std::size_t n,
                   std::uint64_t seed);

// The sample used by replicate `rep` of an experiment with master `seed`.
Sample replicate_sample(const DistributionModel& model, std::size_t n,
                        std::uint64_t seed, std::size_t rep);

double true_value(const DistributionModel& model, const MeasureSpec& spec);
double true_value(const DistributionModel& model, const MeasureSpec& spec1,
                  const std::optional<MeasureSpec>& spec2,
                  const Coupling& coupling);

struct ExperimentConfig {
  MeasureSpec spec1;
  std::optional<MeasureSpec> spec2;
  Coupling coupling = Coupling::first();
  KPolicy k_policy = KPolicy::default_policy();
  std::optional<std::size_t> fixed_k;  // overrides k_policy when set
  EstimateOptions options;
};

struct Summary {
  double mean = 0.0;
  double sd = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct ExperimentReport {
  std::string model;
  std::string measure1;
  std::string measure2;
  std::string coupling;
  double alpha = 0.05;
  std::size_t n = 0;
  std::uint64_t seed = 0;

  std::size_t replicates = 0;
  std::size_t failures = 0;
  double failure_fraction = 0.0;
  double true_value = 0.0;
  double mean_point = 0.0;
  double bias = 0.0;
  double rmse = 0.0;
  double median_abs_rel_error = 0.0;
  // Coverage among replicates that produced an interval, and over all
  // successful replicates (missing intervals count as misses).
  std::size_t ci_count = 0;
  double ci_coverage = 0.0;
  double ci_coverage_all = 0.0;
  double mean_ci_width = 0.0;
  double mean_k = 0.0;
  Summary gamma_hat1;
  std::optional<Summary> gamma_hat2;
};

ExperimentReport run_experiment(const DistributionModel& model,
                                const ExperimentConfig& config, std::size_t n,
                                std::size_t replicates, std::uint64_t seed);

struct SecondOrderRow {
  double epsilon = 0.0;
  double max_abs_excess = 0.0;  // max_s |H(Q(1-eps s))/H(Q(1-eps)) - s^-g|
  double a_value = 0.0;         // fitted A(1/eps)
  double max_rel_deviation = 0.0;
};

/// Compares the ratio excess against s^-g (s^-omega - 1)/omega, with A(1/eps)
/// = C eps^-omega and C fitted by least squares at the smallest epsilon.
std::vector<SecondOrderRow> second_order_diagnostic(
    const DistributionModel& model, const std::vector<double>& epsilons,
    const Transform& h = Transform::identity());

}  // namespace tailcouple
