#pragma once

namespace tailcouple {

double normal_cdf(double x);

double normal_quantile(double p);

}  // namespace tailcouple
