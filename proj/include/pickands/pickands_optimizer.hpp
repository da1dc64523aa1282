#pragma once

#include <span>
#include <string>
#include <vector>

namespace pickands {

/// f(kappa) = e^{kappa + sqrt(1+kappa^2)} / (1 + sqrt(1+kappa^2)), kappa >= 0.
double f_kappa(double kappa);
double log_f_kappa(double kappa);

/// g(kappa) = f(kappa) exp(-(kappa/2)(sqrt(2 f(kappa)/e) - 1)), kappa in [1/1000, 1000].
double objective_g(double kappa);
double log_objective_g(double kappa);

inline constexpr double kKappaMin = 1e-3;
inline constexpr double kKappaMax = 1e3;
inline constexpr double kBMargin = 1e-5;
/// The constant the lower bound needs g* / e to clear.
inline constexpr double kPickandsBase = 1.15279;

struct OptimizationConstraints {
  bool b_lt_f = false;
  bool slope_constraint = false;  // |1 + kappa b / Y - sqrt(2b/e)| <= 1e-9
  bool Y_in_range = false;
  bool all() const noexcept { return b_lt_f && slope_constraint && Y_in_range; }
};

struct OptimizationResult {
  double kappa_star = 0.0;
  double f_at_kappa = 0.0;
  double b_chosen = 0.0;
  double Y_chosen = 0.0;
  double g_star = 0.0;
  OptimizationConstraints constraints;
  bool brackets_agree = true;  // golden section from several brackets hit the same kappa
  bool used_fallback = false;  // dense grid + refinement was needed
  double kappa_spread = 0.0;
};

/// Golden-section maximisation of g on [0.5, 2.5] after a coarse log scan of
/// [1/1000, 1000], b = f(kappa*)(1 - 1e-5), Y from kappa b / Y = sqrt(2b/e) - 1.
/// Throws ConstraintError if Y leaves [1, 1000].
OptimizationResult optimize();

/// Maximiser of a scalar function on [lo, hi] by golden section.
template <class Fn>
double golden_section_max(Fn&& fn, double lo, double hi, double tol) {
  constexpr double inv_phi = 0.6180339887498949;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = fn(x1);
  double f2 = fn(x2);
  while (hi - lo > tol) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = fn(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = fn(x1);
    }
  }
  return 0.5 * (lo + hi);
}

/// sum_{j>=1} e^{-lambda j^alpha / alpha} against lambda^{-1/alpha} alpha^{1/alpha-1} Gamma(1/alpha).
struct GammaSumReport {
  double lhs = 0.0;          // truncated sum plus the analytic tail bound
  double rhs = 0.0;
  double tail_bound = 0.0;
  std::size_t terms = 0;
  double ratio() const noexcept { return lhs / rhs; }
  bool holds() const noexcept { return lhs <= rhs; }
};
GammaSumReport gamma_sum_bound_check(double lambda, double alpha);

/// Closed-form maximiser of y e^{-(lambda y + mu / y)} and a numeric check of it.
struct WeightedSumMax {
  double y_star = 0.0;
  double value = 0.0;
  double numeric_y = 0.0;
  double numeric_value = 0.0;
  double relative_gap() const noexcept;
};
WeightedSumMax weighted_sum_maximizer_check(double lambda, double mu);

struct HAlphaCurvePoint {
  double alpha;
  double lower_bound_shape;  // c alpha^{5/2} 1.15279^{1/alpha} / Gamma(1/alpha)
  double conjecture;         // 1 / Gamma(1/alpha)
  double michna;             // alpha / (4 Gamma(1/alpha)) (1/4)^{1/alpha}
  double prior_harper;       // c alpha / Gamma(1/alpha) (1/2)^{1/alpha}
};

/// Throws ConstraintError if the optimizer's g*/e falls below 1.15279 and
/// DomainError for alphas outside (0, 2].
std::vector<HAlphaCurvePoint> emit_halpha_curve(std::span<const double> alphas, double c = 1.0);
HAlphaCurvePoint halpha_point(double alpha, double c = 1.0);

inline constexpr const char* kHAlphaCsvHeader = "alpha,lower_bound_shape,conjecture,michna,prior_harper";
std::string halpha_csv(std::span<const HAlphaCurvePoint> points);
std::vector<HAlphaCurvePoint> parse_halpha_csv(const std::string& text);

/// Roots of alpha^{5/2} 1.15279^{1/alpha} = 1 by bisection: the small-alpha
/// crossover below which the shape exceeds 1, and the upper root.
struct Crossover {
  double lower;
  double upper;
};
Crossover halpha_crossover(double tol = 1e-10);

/// prop2 parameters for a Shao(alpha) instance at level u:
/// (C, K, N) = (u alpha, kappa*/(u alpha), floor(Y^{1/alpha})) with N clamped to [1, n-1].
struct Prop2Parameters {
  double C;
  double K;
  std::size_t N;
  double N_unclamped;
};
Prop2Parameters prop2_parameters(double alpha, double u, std::size_t n, const OptimizationResult& opt);

}  // namespace pickands
