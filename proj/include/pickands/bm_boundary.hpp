#pragma once

#include <utility>
#include <vector>

#include "pickands/constants.hpp"
#include "pickands/monte_carlo.hpp"

namespace pickands {

/// Boundary s -> a + b s on [0, t].
struct LineBoundary {
  double a;
  double b;
  double t;
};

/// Boundary s -> a + b min(s, t0) on [0, t].
struct PiecewiseBoundary {
  double a;
  double b;
  double t0;
  double t;
};

void validate(const LineBoundary& boundary);
void validate(const PiecewiseBoundary& boundary);

/// P(W_s <= a + b s for all s in [0, t]) for standard Brownian motion:
///   Phi((a+bt)/sqrt t) - e^{-2ab} Phi((bt-a)/sqrt t),
/// combined in the log domain so neither term over- or underflows.
double exact_line_noncrossing(const LineBoundary& boundary);
double log_line_noncrossing(const LineBoundary& boundary);

/// c1 min{1, a/|bt|} Phi((a+bt)/sqrt t). Requires b < 0 and
/// |b| sqrt(t) >= constants.lemma1_threshold.
double lemma1_lower_bound(const LineBoundary& boundary, const ConstantPolicy& constants);

/// c2(H) min{1, a/sqrt t}. Requires b <= 0 and |b| sqrt(t) <= H.
double lemma2_lower_bound(const LineBoundary& boundary, double H, const ConstantPolicy& constants);

/// c3 min{1, a/|b t0|} Phi((a/2 + b t0)/sqrt t0) min{1, a/sqrt t};
/// the first factor is 1 when b = 0.
double lemma3_lower_bound(const PiecewiseBoundary& boundary, const ConstantPolicy& constants);

/// log of the lemma3 expression without its constant. Accepts t0 == t
/// (the piecewise boundary degenerates to a line), which theorem2 needs at N = 1.
double lemma3_log_shape(double a, double b, double t0, double t);

/// Deterministic oracle for the piecewise boundary: integrates the density of
/// W_{t0} killed at the line (Brownian-bridge crossing factor) against the
/// reflection-principle survival of the flat part.
double piecewise_noncrossing_quadrature(const PiecewiseBoundary& boundary);

struct PathConfig {
  MCConfig mc;
  double step = 0.0;  // 0: horizon / 10^4
};

/// Euler-skeleton estimate of P(W_s <= a + b min(s, t0) for all s <= t).
/// The skeleton is only checked on the grid, so the estimate is biased
/// upwards (a discrete path crosses less often than a continuous one).
/// Requires samples >= 10^3 and step <= t/100.
MCEstimate mc_piecewise_noncrossing(const PiecewiseBoundary& boundary, const PathConfig& cfg);
MCEstimate mc_line_noncrossing(const LineBoundary& boundary, const PathConfig& cfg);

/// beta = -zeta(1/2)/sqrt(2 pi): a skeleton with step h behaves like the
/// continuous path under a boundary raised by beta sqrt(h).
inline constexpr double kDiscreteMonitoringShift = 0.5825971579390106;

struct LemmaCalibrationGrid {
  std::vector<double> a{0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0};
  std::vector<double> t{0.25, 1.0, 4.0, 16.0};
  /// Values of |b| sqrt(t) for lemma1.
  std::vector<double> lemma1_scaled_slopes{0.25, 0.5, 1.0, 2.0, 3.0, 4.0, 6.0, 10.0, 20.0, 50.0};
  /// Fractions of H giving |b| sqrt(t) for lemma2.
  std::vector<double> lemma2_slope_fractions{0.0, 0.25, 0.5, 0.75, 1.0};
  double lemma2_H = 3.0;
  std::vector<double> lemma3_a{0.05, 0.2, 1.0, 5.0, 20.0};
  std::vector<double> lemma3_b{0.0, -0.1, -0.5, -1.0, -2.0, -5.0, -10.0};
  std::vector<double> lemma3_t0{0.1, 0.5, 1.0, 2.0};
  std::vector<double> lemma3_horizon_ratio{1.0, 1.001, 1.5, 4.0, 20.0};
  /// Thresholds scanned for the lemma1 report.
  std::vector<double> lemma1_thresholds{0.25, 0.5, 1.0, 2.0, 3.0, 4.0, 6.0, 10.0};
  /// the lemma1 proof establishes the bound with constant 1/3.
  double lemma1_ratio_target = 3.0;
};

struct LemmaCalibration {
  double lemma1_worst_ratio = 0.0;
  LineBoundary lemma1_worst{};
  double lemma2_worst_ratio = 0.0;
  double lemma2_H = 0.0;
  LineBoundary lemma2_worst{};
  double lemma3_worst_ratio = 0.0;
  PiecewiseBoundary lemma3_worst{};
  /// (threshold H, worst lemma1 ratio over |b| sqrt t >= H).
  std::vector<std::pair<double, double>> lemma1_ratio_by_threshold;
  /// Smallest scanned H with worst ratio <= lemma1_ratio_target; NaN if none.
  double lemma1_smallest_threshold = 0.0;
  std::size_t points = 0;
};

/// Ratios (expression with constant 1) / (exact probability) over the grid,
/// lemma1 restricted to |b| sqrt t >= lemma1_threshold. lemma3 uses the
/// quadrature oracle.
LemmaCalibration calibrate_lemma_constants(const LemmaCalibrationGrid& grid = {},
                                           double lemma1_threshold = 3.0);

}  // namespace pickands
