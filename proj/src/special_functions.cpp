#include "pickands/special_functions.hpp"

#include <cmath>
#include <limits>

#include "pickands/errors.hpp"

namespace pickands {

double normal_pdf(double x) noexcept { return std::exp(-0.5 * x * x - kLogSqrt2Pi); }

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / kSqrt2); }

namespace {

// log of the Mills ratio (1 - Phi(z)) / phi(z) for z >= 10 by the Laplace
// continued fraction 1/(z+ 1/(z+ 2/(z+ ...))); 60 terms is far past convergence there.
double log_mills_ratio(double z) noexcept {
  double tail = z;
  for (int k = 60; k >= 1; --k) tail = z + k / tail;
  return -std::log(tail);
}

}  // namespace

double log_normal_cdf(double x) noexcept {
  if (x > 0.0) return std::log1p(-0.5 * std::erfc(x / kSqrt2));
  if (x >= -10.0) return std::log(0.5 * std::erfc(-x / kSqrt2));
  const double z = -x;
  return -0.5 * z * z - kLogSqrt2Pi + log_mills_ratio(z);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: p must lie in (0, 1)");
  double lo = -40.0;
  double hi = 40.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    (normal_cdf(mid) < p ? lo : hi) = mid;
  }
  double x = 0.5 * (lo + hi);
  // Newton polish; bisection alone stalls on the flat tails.
  for (int i = 0; i < 2; ++i) {
    const double d = normal_pdf(x);
    if (d <= 0.0) break;
    x -= (normal_cdf(x) - p) / d;
  }
  return x;
}

double log_gamma(double x) {
  if (!(x > 0.0)) throw DomainError("log_gamma: argument must be positive");
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

double log1m_exp(double x) noexcept {
  if (x > -0.6931471805599453) return std::log(-std::expm1(x));
  return std::log1p(-std::exp(x));
}

double log_diff_exp(double a, double b) noexcept {
  if (b == -std::numeric_limits<double>::infinity()) return a;
  if (a == b) return -std::numeric_limits<double>::infinity();
  return a + log1m_exp(b - a);
}

}  // namespace pickands
