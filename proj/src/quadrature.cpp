#include "tailcouple/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>

namespace tailcouple::quad {

namespace {
constexpr unsigned kMaxDepth = 15;
}

double integrate(const Integrand& f, double a, double b, double rel_tol) {
  using boost::math::quadrature::gauss_kronrod;
  double error = 0.0;
  return gauss_kronrod<double, 61>::integrate(f, a, b, kMaxDepth, rel_tol,
                                              &error);
}

double integrate_near_zero(const Integrand& g, double u, double rel_tol) {
  auto transformed = [&](double t) {
    const double v = u * std::exp(-t);
    if (v == 0.0) return 0.0;
    return g(v) * v;
  };
  // Split at t = 1 so the smooth body and the exponential tail are resolved
  // by separate adaptive passes.
  const double body = integrate(transformed, 0.0, 1.0, rel_tol);
  const double tail = integrate(transformed, 1.0,
                                std::numeric_limits<double>::infinity(),
                                rel_tol);
  return body + tail;
}

}  // namespace tailcouple::quad
