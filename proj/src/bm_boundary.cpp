#include "pickands/bm_boundary.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "pickands/errors.hpp"
#include "pickands/special_functions.hpp"

namespace pickands {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool finite_all(std::initializer_list<double> xs) {
  return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

// 20-point Gauss-Legendre rule on [-1, 1], built once by Newton iteration on P_20.
struct GaussLegendre {
  static constexpr int kOrder = 20;
  std::array<double, kOrder> nodes{};
  std::array<double, kOrder> weights{};

  GaussLegendre() {
    for (int i = 0; i < kOrder; ++i) {
      double x = std::cos(kPi * (i + 0.75) / (kOrder + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= kOrder; ++k) {
          const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = pk;
        }
        dp = kOrder * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      nodes[i] = x;
      weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }
};

const GaussLegendre& gauss_legendre() {
  static const GaussLegendre rule;
  return rule;
}

double log_quadrature_piecewise(double a, double b, double t0, double t) {
  // y = (a + b t0) - W_{t0} >= 0 is the gap below the boundary at the break.
  const double c = a + b * t0;
  const double tau = t - t0;
  const double sd0 = std::sqrt(t0);
  const double log_scale = c > 0.0 ? 0.0 : -c * c / (2.0 * t0);

  auto integrand = [&](double y) {
    const double d = c - y;
    const double log_density = -d * d / (2.0 * t0) - log_scale;
    const double killed = -std::expm1(-2.0 * a * y / t0);
    const double flat = std::erf(y / std::sqrt(2.0 * tau));
    return std::exp(log_density) * killed * flat;
  };

  double h0 = std::min({std::sqrt(tau), t0 / (2.0 * a), sd0});
  if (c < 0.0) h0 = std::min(h0, t0 / -c);
  h0 /= 16.0;
  const double max_width = sd0 / 4.0;
  const double y_max = std::max(c, 0.0) + 14.0 * sd0;

  const auto& rule = gauss_legendre();
  double sum = 0.0;
  double lo = 0.0;
  double width = h0;
  while (lo < y_max) {
    const double hi = std::min(lo + width, y_max);
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    double panel = 0.0;
    for (int i = 0; i < GaussLegendre::kOrder; ++i) panel += rule.weights[i] * integrand(mid + half * rule.nodes[i]);
    sum += half * panel;
    lo = hi;
    width = std::min(2.0 * width, max_width);
  }
  if (!(sum > 0.0)) return kNegInf;
  return std::log(sum) + log_scale - 0.5 * std::log(2.0 * kPi * t0);
}

MCEstimate skeleton_noncrossing(double a, double b, double t0, double t, const PathConfig& cfg) {
  if (cfg.mc.samples < 1000) throw PreconditionError("Brownian MC needs at least 10^3 samples");
  const double step = cfg.step > 0.0 ? cfg.step : t / 1e4;
  const auto steps = static_cast<std::size_t>(std::llround(t / step));
  if (steps < 100) throw PreconditionError("Brownian MC step must be at most t/100");
  const double h = t / static_cast<double>(steps);
  const double sd = std::sqrt(h);

  std::vector<double> boundary(steps);
  for (std::size_t k = 0; k < steps; ++k) boundary[k] = a + b * std::min(h * static_cast<double>(k + 1), t0);

  return estimate_probability(cfg.mc, [&](Rng& rng) {
    NormalSampler normal;
    double w = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
      w += sd * normal(rng);
      if (w > boundary[k]) return false;
    }
    return true;
  });
}

}  // namespace

void validate(const LineBoundary& boundary) {
  if (!finite_all({boundary.a, boundary.b, boundary.t})) throw DomainError("line boundary: non-finite parameter");
  if (!(boundary.a > 0.0)) throw DomainError("line boundary: a must be positive");
  if (!(boundary.t > 0.0)) throw DomainError("line boundary: t must be positive");
}

void validate(const PiecewiseBoundary& boundary) {
  if (!finite_all({boundary.a, boundary.b, boundary.t0, boundary.t}))
    throw DomainError("piecewise boundary: non-finite parameter");
  if (!(boundary.a > 0.0)) throw DomainError("piecewise boundary: a must be positive");
  if (boundary.b > 0.0) throw DomainError("piecewise boundary: slope b must be non-positive");
  // t0 == t is accepted: the boundary is then the line a + b s
  if (!(boundary.t0 > 0.0 && boundary.t0 <= boundary.t))
    throw DomainError("piecewise boundary: need 0 < t0 <= t");
}

double log_line_noncrossing(const LineBoundary& boundary) {
  validate(boundary);
  const auto [a, b, t] = boundary;
  const double st = std::sqrt(t);
  const double log_first = log_normal_cdf((a + b * t) / st);
  const double log_second = -2.0 * a * b + log_normal_cdf((b * t - a) / st);
  if (log_second >= log_first) return kNegInf;
  return std::min(0.0, log_diff_exp(log_first, log_second));
}

double exact_line_noncrossing(const LineBoundary& boundary) {
  return std::clamp(std::exp(log_line_noncrossing(boundary)), 0.0, 1.0);
}

double lemma1_lower_bound(const LineBoundary& boundary, const ConstantPolicy& constants) {
  validate(boundary);
  const auto [a, b, t] = boundary;
  if (!(b < 0.0)) throw PreconditionError("lemma1 requires a negative slope");
  if (-b * std::sqrt(t) < constants.lemma1_threshold)
    throw PreconditionError("lemma1 requires |b| sqrt(t) >= the configured threshold");
  return constants.lemma1 * std::min(1.0, a / (-b * t)) * normal_cdf((a + b * t) / std::sqrt(t));
}

double lemma2_lower_bound(const LineBoundary& boundary, double H, const ConstantPolicy& constants) {
  validate(boundary);
  const auto [a, b, t] = boundary;
  if (!(H > 0.0)) throw DomainError("lemma2 requires H > 0");
  if (b > 0.0) throw PreconditionError("lemma2 requires a non-positive slope");
  if (-b * std::sqrt(t) > H) throw PreconditionError("lemma2 requires |b| sqrt(t) <= H");
  if (H > constants.lemma2_max_H)
    throw PreconditionError("lemma2 constant was calibrated for a smaller H");
  return constants.lemma2 * std::min(1.0, a / std::sqrt(t));
}

double lemma3_log_shape(double a, double b, double t0, double t) {
  if (!(a > 0.0) || b > 0.0 || !(t0 > 0.0) || t0 > t || !finite_all({a, b, t0, t}))
    throw DomainError("lemma3: need a > 0, b <= 0, 0 < t0 <= t");
  const double slope_factor = b == 0.0 ? 1.0 : std::min(1.0, a / (-b * t0));
  return std::log(slope_factor) + log_normal_cdf((0.5 * a + b * t0) / std::sqrt(t0)) +
         std::log(std::min(1.0, a / std::sqrt(t)));
}

double lemma3_lower_bound(const PiecewiseBoundary& boundary, const ConstantPolicy& constants) {
  validate(boundary);
  return constants.lemma3 * std::exp(lemma3_log_shape(boundary.a, boundary.b, boundary.t0, boundary.t));
}

double piecewise_noncrossing_quadrature(const PiecewiseBoundary& boundary) {
  validate(boundary);
  if (boundary.t0 == boundary.t) return exact_line_noncrossing({boundary.a, boundary.b, boundary.t});
  return std::clamp(std::exp(log_quadrature_piecewise(boundary.a, boundary.b, boundary.t0, boundary.t)), 0.0, 1.0);
}

MCEstimate mc_piecewise_noncrossing(const PiecewiseBoundary& boundary, const PathConfig& cfg) {
  validate(boundary);
  return skeleton_noncrossing(boundary.a, boundary.b, boundary.t0, boundary.t, cfg);
}

MCEstimate mc_line_noncrossing(const LineBoundary& boundary, const PathConfig& cfg) {
  validate(boundary);
  return skeleton_noncrossing(boundary.a, boundary.b, boundary.t, boundary.t, cfg);
}

LemmaCalibration calibrate_lemma_constants(const LemmaCalibrationGrid& grid, double lemma1_threshold) {
  LemmaCalibration out;
  const ConstantPolicy unit = ConstantPolicy::shape();

  std::vector<std::pair<double, double>> lemma1_samples;  // (|b| sqrt t, ratio)
  for (double a : grid.a) {
    for (double t : grid.t) {
      const double st = std::sqrt(t);
      for (double y : grid.lemma1_scaled_slopes) {
        const LineBoundary line{a, -y / st, t};
        const double log_bound = std::log(std::min(1.0, a / (y * st))) + log_normal_cdf((a + line.b * t) / st);
        const double ratio = std::exp(log_bound - log_line_noncrossing(line));
        lemma1_samples.emplace_back(y, ratio);
        ++out.points;
        if (y >= lemma1_threshold && ratio > out.lemma1_worst_ratio) {
          out.lemma1_worst_ratio = ratio;
          out.lemma1_worst = line;
        }
      }
      for (double frac : grid.lemma2_slope_fractions) {
        const LineBoundary line{a, -frac * grid.lemma2_H / st, t};
        const double ratio =
            lemma2_lower_bound(line, grid.lemma2_H, unit) / exact_line_noncrossing(line);
        ++out.points;
        if (ratio > out.lemma2_worst_ratio) {
          out.lemma2_worst_ratio = ratio;
          out.lemma2_worst = line;
        }
      }
    }
  }
  out.lemma2_H = grid.lemma2_H;

  out.lemma1_smallest_threshold = std::numeric_limits<double>::quiet_NaN();
  for (double H : grid.lemma1_thresholds) {
    double worst = 0.0;
    for (const auto& [y, ratio] : lemma1_samples)
      if (y >= H) worst = std::max(worst, ratio);
    out.lemma1_ratio_by_threshold.emplace_back(H, worst);
    if (std::isnan(out.lemma1_smallest_threshold) && worst > 0.0 && worst <= grid.lemma1_ratio_target)
      out.lemma1_smallest_threshold = H;
  }

  for (double a : grid.lemma3_a) {
    for (double b : grid.lemma3_b) {
      for (double t0 : grid.lemma3_t0) {
        for (double ratio_t : grid.lemma3_horizon_ratio) {
          const double t = t0 * ratio_t;
          const double log_exact = ratio_t == 1.0 ? log_line_noncrossing({a, b, t})
                                                  : log_quadrature_piecewise(a, b, t0, t);
          const double ratio = std::exp(lemma3_log_shape(a, b, t0, t) - log_exact);
          ++out.points;
          if (ratio > out.lemma3_worst_ratio) {
            out.lemma3_worst_ratio = ratio;
            out.lemma3_worst = {a, b, t0, t};
          }
        }
      }
    }
  }
  return out;
}

}  // namespace pickands
