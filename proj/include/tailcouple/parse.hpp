#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

#include "tailcouple/coupled.hpp"
#include "tailcouple/measure.hpp"
#include "tailcouple/sim_lab.hpp"
#include "tailcouple/tail_fit.hpp"

namespace tailcouple {

// Spec strings of the form "name" or "name:key=value,key=value".
// All failures throw ParseError.

Distortion parse_distortion(std::string_view text);  // mean | pht:rho= | cte:t=
Transform parse_transform(std::string_view text);    // identity | power:beta=
MeasureSpec parse_measure(std::string_view measure, std::string_view transform = "identity");
Coupling parse_coupling(std::string_view text);      // first | ratio | zenga:p=
DistributionModel parse_model(std::string_view text);

// "auto", a literal rank, "fraction:c=", "power:a=" or "scan".
struct KChoice {
  std::optional<std::size_t> fixed;
  KPolicy policy = KPolicy::default_policy();

  std::size_t resolve(const Sample& s, const Transform& h) const;
};
KChoice parse_k(std::string_view text);

double parse_number(std::string_view text);

}  // namespace tailcouple
