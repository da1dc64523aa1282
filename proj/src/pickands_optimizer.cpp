#include "pickands/pickands_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "pickands/errors.hpp"
#include "pickands/special_functions.hpp"

namespace pickands {

namespace {

constexpr double kKappaTol = 1e-10;
constexpr double kAgreeTol = 1e-6;

// Coarse log-spaced scan of [kKappaMin, kKappaMax]; returns the best grid index and the grid.
std::pair<std::size_t, std::vector<double>> coarse_scan(std::size_t points) {
  std::vector<double> grid(points);
  const double lo = std::log(kKappaMin);
  const double hi = std::log(kKappaMax);
  std::size_t best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1));
    const double v = log_objective_g(grid[i]);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  return {best, grid};
}

double log_halpha_shape(double alpha) {
  return 2.5 * std::log(alpha) + std::log(kPickandsBase) / alpha;
}

}  // namespace

double log_f_kappa(double kappa) {
  if (!(kappa >= 0.0)) throw DomainError("f(kappa) needs kappa >= 0");
  const double s = std::sqrt(1.0 + kappa * kappa);
  return kappa + s - std::log1p(s);
}

double f_kappa(double kappa) { return std::exp(log_f_kappa(kappa)); }

double log_objective_g(double kappa) {
  if (!(kappa >= kKappaMin && kappa <= kKappaMax)) throw DomainError("g(kappa) needs 1/1000 <= kappa <= 1000");
  const double lf = log_f_kappa(kappa);
  // sqrt(2 f / e) - 1, accurate when f is close to e/2
  const double root_minus_one = std::expm1(0.5 * (std::log(2.0) + lf - 1.0));
  return lf - 0.5 * kappa * root_minus_one;
}

double objective_g(double kappa) { return std::exp(log_objective_g(kappa)); }

OptimizationResult optimize() {
  OptimizationResult out;
  const auto [best, grid] = coarse_scan(601);
  auto objective = [](double k) { return log_objective_g(k); };

  const double primary = golden_section_max(objective, 0.5, 2.5, kKappaTol);
  const double lo_neighbor = grid[best == 0 ? 0 : best - 1];
  const double hi_neighbor = grid[std::min(best + 1, grid.size() - 1)];
  const double candidates[] = {
      golden_section_max(objective, 0.3, 3.0, kKappaTol),
      golden_section_max(objective, kKappaMin, 10.0, kKappaTol),
      golden_section_max(objective, lo_neighbor, hi_neighbor, kKappaTol),
  };
  double spread = 0.0;
  for (double c : candidates) spread = std::max(spread, std::abs(c - primary));
  out.kappa_spread = spread;
  out.brackets_agree = spread <= kAgreeTol;

  double kappa = primary;
  const bool scan_inside = grid[best] >= 0.5 && grid[best] <= 2.5;
  if (!out.brackets_agree || !scan_inside) {
    // dense grid, then refine around the best point
    out.used_fallback = true;
    const auto [dense_best, dense] = coarse_scan(200001);
    kappa = golden_section_max(objective, dense[dense_best == 0 ? 0 : dense_best - 1],
                               dense[std::min(dense_best + 1, dense.size() - 1)], kKappaTol);
  }

  out.kappa_star = kappa;
  out.f_at_kappa = f_kappa(kappa);
  out.g_star = objective_g(kappa);
  out.b_chosen = out.f_at_kappa * (1.0 - kBMargin);
  const double root = std::sqrt(2.0 * out.b_chosen / kE);
  if (!(root > 1.0)) throw ConstraintError("sqrt(2b/e) <= 1; no admissible Y");
  out.Y_chosen = kappa * out.b_chosen / (root - 1.0);

  out.constraints.b_lt_f = out.b_chosen < out.f_at_kappa;
  out.constraints.slope_constraint = std::abs(1.0 + kappa * out.b_chosen / out.Y_chosen - root) <= 1e-9;
  out.constraints.Y_in_range = out.Y_chosen >= 1.0 && out.Y_chosen <= 1000.0;
  if (!out.constraints.Y_in_range) throw ConstraintError("solved Y lies outside [1, 1000]");
  return out;
}

GammaSumReport gamma_sum_bound_check(double lambda, double alpha) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("gamma sum check needs lambda > 0");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("gamma sum check needs alpha in (0, 1]");
  const double s = 1.0 / alpha;
  GammaSumReport out;
  out.rhs = std::exp(-s * std::log(lambda) + (s - 1.0) * std::log(alpha) + log_gamma(s));

  // Truncate where x = lambda J^alpha / alpha reaches max(2s, 40), capped at 1e8 terms.
  const double x_target = std::max(2.0 * s, 40.0);
  const double J_target = std::pow(alpha * x_target / lambda, s);
  const auto J = static_cast<std::size_t>(std::clamp(std::ceil(J_target), 1.0, 1e8));
  double sum = 0.0;
  for (std::size_t j = J; j >= 1; --j)  // smallest terms first
    sum += std::exp(-lambda * std::pow(static_cast<double>(j), alpha) / alpha);
  out.terms = J;

  // sum_{j > J} <= int_J^inf e^{-lambda t^alpha/alpha} dt = (1/alpha)(alpha/lambda)^{1/alpha} Gamma(s, x)
  // with Gamma(s, x) <= x^{s-1} e^{-x} / (1 - (s-1)/x) for x > s - 1 (and <= x^{s-1} e^{-x} if s <= 1).
  const double x = lambda * std::pow(static_cast<double>(J), alpha) / alpha;
  double log_upper_gamma = (s - 1.0) * std::log(x) - x;
  if (s > 1.0) log_upper_gamma -= std::log1p(-(s - 1.0) / x);
  out.tail_bound = std::exp(-std::log(alpha) + s * (std::log(alpha) - std::log(lambda)) + log_upper_gamma);
  out.lhs = sum + out.tail_bound;
  return out;
}

double WeightedSumMax::relative_gap() const noexcept { return std::abs(numeric_value - value) / value; }

WeightedSumMax weighted_sum_maximizer_check(double lambda, double mu) {
  if (!(lambda > 0.0) || !(mu > 0.0)) throw DomainError("weighted sum check needs lambda, mu > 0");
  WeightedSumMax out;
  const double root = std::sqrt(1.0 + 4.0 * lambda * mu);
  out.y_star = (1.0 + root) / (2.0 * lambda);
  out.value = std::exp(-root) * out.y_star;

  auto log_h = [&](double log_y) {
    const double y = std::exp(log_y);
    return log_y - lambda * y - mu / y;
  };
  // grid over y in (0, 10 y*] on a log scale, then golden section around the best cell
  const double hi = std::log(10.0 * out.y_star);
  const double lo = hi - std::log(1e6);
  constexpr int kGrid = 4000;
  int best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kGrid; ++i) {
    const double v = log_h(lo + (hi - lo) * i / kGrid);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  const double cell = (hi - lo) / kGrid;
  const double log_y = golden_section_max(log_h, lo + (best - 1) * cell, lo + (best + 1) * cell, 1e-12);
  out.numeric_y = std::exp(log_y);
  out.numeric_value = std::exp(log_h(log_y));
  return out;
}

HAlphaCurvePoint halpha_point(double alpha, double c) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("alpha must lie in (0, 2]");
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("c must be positive");
  const double s = 1.0 / alpha;
  HAlphaCurvePoint p{alpha, 0.0, 0.0, 0.0, 0.0};
  if (s <= 170.0) {
    // direct form keeps the small-integer cases exact (alpha = 1 gives 1 and 1/16)
    const double gamma = std::tgamma(s);
    p.conjecture = 1.0 / gamma;
    p.michna = alpha / (4.0 * gamma) * std::pow(0.25, s);
    p.prior_harper = c * alpha / gamma * std::pow(0.5, s);
    p.lower_bound_shape = c * std::pow(alpha, 2.5) * std::pow(kPickandsBase, s) / gamma;
  } else {
    const double lg = log_gamma(s);
    p.conjecture = std::exp(-lg);
    p.michna = std::exp(std::log(alpha / 4.0) - lg + s * std::log(0.25));
    p.prior_harper = std::exp(std::log(c * alpha) - lg + s * std::log(0.5));
    p.lower_bound_shape = std::exp(std::log(c) + log_halpha_shape(alpha) - lg);
  }
  for (double v : {p.lower_bound_shape, p.conjecture, p.michna, p.prior_harper})
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("H_alpha curve value is not positive and finite");
  return p;
}

std::vector<HAlphaCurvePoint> emit_halpha_curve(std::span<const double> alphas, double c) {
  const OptimizationResult opt = optimize();
  if (!(opt.g_star / kE >= kPickandsBase)) throw ConstraintError("g*/e fell below 1.15279");
  std::vector<HAlphaCurvePoint> out;
  out.reserve(alphas.size());
  for (double a : alphas) out.push_back(halpha_point(a, c));
  return out;
}

std::string halpha_csv(std::span<const HAlphaCurvePoint> points) {
  std::string out = std::string(kHAlphaCsvHeader) + "\n";
  char line[256];
  for (const auto& p : points) {
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g\n", p.alpha, p.lower_bound_shape, p.conjecture,
                  p.michna, p.prior_harper);
    out += line;
  }
  return out;
}

std::vector<HAlphaCurvePoint> parse_halpha_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  std::vector<HAlphaCurvePoint> out;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != kHAlphaCsvHeader) throw PreconditionError("unexpected H_alpha CSV header: " + line);
      header_seen = true;
      continue;
    }
    HAlphaCurvePoint p{};
    char tail = 0;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf%c", &p.alpha, &p.lower_bound_shape, &p.conjecture,
                    &p.michna, &p.prior_harper, &tail) != 5)
      throw PreconditionError("malformed H_alpha CSV row: " + line);
    out.push_back(p);
  }
  if (!header_seen) throw PreconditionError("H_alpha CSV has no header");
  return out;
}

Crossover halpha_crossover(double tol) {
  const double turning = 0.4 * std::log(kPickandsBase);  // minimiser of the log shape
  auto bisect = [&](double lo, double hi) {
    const bool lo_positive = log_halpha_shape(lo) > 0.0;
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      if ((log_halpha_shape(mid) > 0.0) == lo_positive)
        lo = mid;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  };
  return {bisect(1e-4, turning), bisect(turning, 2.0)};
}

Prop2Parameters prop2_parameters(double alpha, double u, std::size_t n, const OptimizationResult& opt) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("alpha must lie in (0, 2)");
  if (!(u > 0.0)) throw DomainError("u must be positive");
  if (n < 2) throw DomainError("n must be at least 2");
  Prop2Parameters p{};
  p.C = u * alpha;
  p.K = opt.kappa_star / (u * alpha);
  p.N_unclamped = std::floor(std::pow(opt.Y_chosen, 1.0 / alpha));
  p.N = static_cast<std::size_t>(std::clamp(p.N_unclamped, 1.0, static_cast<double>(n - 1)));
  return p;
}

}  // namespace pickands
