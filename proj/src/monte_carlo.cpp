#include "pickands/monte_carlo.hpp"

#include <cmath>

#include "pickands/errors.hpp"
#include "pickands/special_functions.hpp"

namespace pickands {

Interval wilson_interval(std::uint64_t hits, std::uint64_t trials, double confidence) {
  if (trials == 0) throw PreconditionError("wilson_interval: no trials");
  if (hits > trials) throw PreconditionError("wilson_interval: hits exceed trials");
  const double z = normal_quantile(0.5 + 0.5 * confidence);
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(hits) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  // Endpoints are exact at p = 0 and p = 1; clamp rounding only.
  Interval ci{std::max(0.0, centre - half), std::min(1.0, centre + half)};
  if (hits == 0) ci.low = 0.0;
  if (hits == trials) ci.high = 1.0;
  return ci;
}

MCEstimate make_estimate(std::uint64_t hits, std::uint64_t trials, const MCConfig& cfg) {
  const Interval ci = wilson_interval(hits, trials, cfg.confidence);
  MCEstimate est;
  est.mean = static_cast<double>(hits) / static_cast<double>(trials);
  est.ci_low = std::min(ci.low, est.mean);
  est.ci_high = std::max(ci.high, est.mean);
  est.samples = trials;
  est.seed = cfg.seed;
  est.hits = hits;
  return est;
}

std::uint64_t batch_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace pickands
