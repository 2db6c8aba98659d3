#pragma once

#include <functional>

namespace tailcouple::quad {

using Integrand = std::function<double(double)>;

inline constexpr double kDefaultRelTol = 1e-12;

// Adaptive Gauss-Kronrod (61 point) on [a, b]; b may be +infinity.
double integrate(const Integrand& f, double a, double b,
                 double rel_tol = kDefaultRelTol);

// Integral of g over (0, u] where g may carry an integrable power singularity
// at 0. Uses v = u * exp(-t), which turns v^(-p) into a decaying exponential.
double integrate_near_zero(const Integrand& g, double u,
                           double rel_tol = kDefaultRelTol);

}  // namespace tailcouple::quad
