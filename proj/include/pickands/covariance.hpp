#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace pickands {

/// r(t) = (e^{alpha t/2} + e^{-alpha t/2} - (e^{t/2} - e^{-t/2})^alpha) / 2, 0 < alpha < 2.
double shao_r(double alpha, double t);

struct ShaoKind {
  double alpha;
};
struct ExponentialKind {
  double rate;
};
/// Piecewise-linear interpolation of (lag, r) pairs; lags strictly increasing from 0.
struct TableKind {
  std::vector<double> lags;
  std::vector<double> values;
};

/// A stationary correlation function t -> r(t), immutable after construction.
class CorrelationModel {
 public:
  using Kind = std::variant<ShaoKind, ExponentialKind, TableKind>;

  static CorrelationModel shao(double alpha);
  static CorrelationModel exponential(double rate);
  static CorrelationModel table(std::vector<double> lags, std::vector<double> values);
  /// Values at lags 0, 1, 2, ...
  static CorrelationModel table(std::vector<double> values);

  double operator()(double t) const;

  const Kind& kind() const noexcept { return kind_; }
  std::string name() const;
  std::string describe() const;
  /// Grid spacing used when the caller does not give one: 1/n for Shao, 1 otherwise.
  double default_spacing(std::size_t n) const;

 private:
  explicit CorrelationModel(Kind kind) : kind_(std::move(kind)) {}
  Kind kind_;
};

/// Two columns (lag, r-value); an optional non-numeric header line is skipped.
CorrelationModel load_table_csv(const std::string& path);

/// r(k * spacing) for k = 0..n-1.
Eigen::VectorXd correlation_lags(const CorrelationModel& model, double spacing, std::size_t n);

struct Violation {
  std::size_t index;
  double time;
  double value;
};

struct HypothesisReport {
  bool monotone_nonincreasing = true;
  bool nonnegative = true;
  bool r1_condition = true;
  double r1_value = 0.0;  // r(first gap) * (1 + 2/u^2)
  std::optional<Violation> monotone_witness;
  std::optional<Violation> nonnegative_witness;
  bool sampled = false;  // monotonicity/positivity checked on a subsample

  bool all_pass() const noexcept { return monotone_nonincreasing && nonnegative && r1_condition; }
  /// What the conditioning/comparison chain itself uses.
  bool chain_pass() const noexcept { return monotone_nonincreasing && nonnegative; }
};

/// Checks the theorem1 hypotheses on a sorted time grid: r nonincreasing,
/// r >= 0, and r(first gap) (1 + 2u^{-2}) <= 1. The first gap is
/// grid[1] - grid[0] (grid[0] for a single-point grid).
HypothesisReport check_hypotheses(const CorrelationModel& model, double u, std::span<const double> grid);

/// Same checks on the lattice {k * spacing : 0 <= k < n} without materialising
/// it when n exceeds `max_points`: monotonicity and positivity are then
/// checked on a geometric-plus-uniform subsample.
HypothesisReport check_lattice_hypotheses(const CorrelationModel& model, double u, double spacing,
                                          std::uint64_t n, std::uint64_t max_points = 100000);

/// M = floor((b u^2 alpha / 2)^{1/alpha}) and the grid {i/M : 1 <= i <= M}.
struct SamplingGrid {
  std::uint64_t points;
  double spacing;
  std::vector<double> times() const;
};

inline constexpr double kDefaultGridCap = 1e8;

/// Throws CappedGridError when M would exceed `cap`, PreconditionError when M < 2.
SamplingGrid prop2_grid(double alpha, double u, double b, double cap = kDefaultGridCap);

/// Suggested alpha_0; carried as configuration only.
inline constexpr double kAlphaZero = 1.0 / 400.0;

}  // namespace pickands
