#include "pickands/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pickands/errors.hpp"
#include "pickands/special_functions.hpp"

namespace pickands {

namespace {

void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("Shao covariance needs 0 < alpha < 2");
}

// Below this lag the closed form is replaced by its expansion.
constexpr double kShaoSeriesCutoff = 1e-4;

}  // namespace

double shao_r(double alpha, double t) {
  require_alpha(alpha);
  if (!(t >= 0.0)) throw DomainError("Shao covariance needs t >= 0");
  if (t == 0.0) return 1.0;
  if (t < kShaoSeriesCutoff) {
    const double ta = std::pow(t, alpha);
    return 1.0 - 0.5 * ta + alpha * alpha * t * t / 8.0 - alpha * ta * t * t / 48.0;
  }
  // (e^{t/2} - e^{-t/2})^alpha = e^{alpha t/2} (1 - e^{-t})^alpha, so
  // r = e^{alpha t/2} (1 - (1 - e^{-t})^alpha) / 2 + e^{-alpha t/2} / 2,
  // with the bracket kept in log form to avoid cancellation and overflow.
  const double log_bracket = log1m_exp(alpha * std::log1p(-std::exp(-t)));
  return 0.5 * std::exp(0.5 * alpha * t + log_bracket) + 0.5 * std::exp(-0.5 * alpha * t);
}

CorrelationModel CorrelationModel::shao(double alpha) {
  require_alpha(alpha);
  return CorrelationModel(ShaoKind{alpha});
}

CorrelationModel CorrelationModel::exponential(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw DomainError("exponential correlation needs rate > 0");
  return CorrelationModel(ExponentialKind{rate});
}

CorrelationModel CorrelationModel::table(std::vector<double> lags, std::vector<double> values) {
  if (lags.empty() || lags.size() != values.size()) throw DomainError("correlation table: need matching, non-empty columns");
  if (lags.front() != 0.0) throw DomainError("correlation table: first lag must be 0");
  if (std::abs(values.front() - 1.0) > 1e-12) throw DomainError("correlation table: r(0) must be 1");
  for (std::size_t i = 1; i < lags.size(); ++i)
    if (!(lags[i] > lags[i - 1])) throw DomainError("correlation table: lags must increase strictly");
  for (double v : values)
    if (!std::isfinite(v) || std::abs(v) > 1.0) throw DomainError("correlation table: values must lie in [-1, 1]");
  return CorrelationModel(TableKind{std::move(lags), std::move(values)});
}

CorrelationModel CorrelationModel::table(std::vector<double> values) {
  std::vector<double> lags(values.size());
  for (std::size_t i = 0; i < lags.size(); ++i) lags[i] = static_cast<double>(i);
  return table(std::move(lags), std::move(values));
}

double CorrelationModel::operator()(double t) const {
  if (!(t >= 0.0)) throw DomainError("correlation: lag must be non-negative");
  return std::visit(
      [t](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, ShaoKind>) {
          return shao_r(k.alpha, t);
        } else if constexpr (std::is_same_v<K, ExponentialKind>) {
          return std::exp(-k.rate * t);
        } else {
          const auto& lags = k.lags;
          if (t > lags.back() * (1.0 + 1e-12)) throw DomainError("correlation table: lag beyond last entry");
          const auto it = std::lower_bound(lags.begin(), lags.end(), t);
          if (it == lags.end()) return k.values.back();
          const auto i = static_cast<std::size_t>(it - lags.begin());
          if (*it == t || i == 0) return k.values[i];
          const double w = (t - lags[i - 1]) / (lags[i] - lags[i - 1]);
          return (1.0 - w) * k.values[i - 1] + w * k.values[i];
        }
      },
      kind_);
}

std::string CorrelationModel::name() const {
  return std::visit(
      [](const auto& k) -> std::string {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, ShaoKind>) return "shao";
        else if constexpr (std::is_same_v<K, ExponentialKind>) return "exponential";
        else return "table";
      },
      kind_);
}

std::string CorrelationModel::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(
      [&os](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, ShaoKind>) os << "shao(alpha=" << k.alpha << ")";
        else if constexpr (std::is_same_v<K, ExponentialKind>) os << "exponential(rate=" << k.rate << ")";
        else os << "table(" << k.values.size() << " lags)";
      },
      kind_);
  return os.str();
}

double CorrelationModel::default_spacing(std::size_t n) const {
  if (std::holds_alternative<ShaoKind>(kind_)) return 1.0 / static_cast<double>(std::max<std::size_t>(n, 1));
  return 1.0;
}

CorrelationModel load_table_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open correlation table " + path);
  std::vector<double> lags;
  std::vector<double> values;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    double lag = 0.0;
    double value = 0.0;
    if (!(fields >> lag >> value)) {
      if (first) {
        first = false;
        continue;
      }
      throw PreconditionError("malformed correlation table row: " + line);
    }
    first = false;
    lags.push_back(lag);
    values.push_back(value);
  }
  return CorrelationModel::table(std::move(lags), std::move(values));
}

Eigen::VectorXd correlation_lags(const CorrelationModel& model, double spacing, std::size_t n) {
  if (!(spacing > 0.0)) throw DomainError("grid spacing must be positive");
  Eigen::VectorXd r(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) r[static_cast<Eigen::Index>(k)] = model(spacing * static_cast<double>(k));
  return r;
}

namespace {

void scan(HypothesisReport& report, const CorrelationModel& model, std::span<const double> times,
          std::span<const std::size_t> indices) {
  double previous = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double value = model(times[i]);
    if (report.nonnegative && value < 0.0) {
      report.nonnegative = false;
      report.nonnegative_witness = Violation{indices[i], times[i], value};
    }
    if (i > 0 && report.monotone_nonincreasing && value > previous) {
      report.monotone_nonincreasing = false;
      report.monotone_witness = Violation{indices[i], times[i], value};
    }
    previous = value;
  }
}

void check_r1(HypothesisReport& report, const CorrelationModel& model, double u, double gap) {
  report.r1_value = model(gap) * (1.0 + 2.0 / (u * u));
  report.r1_condition = report.r1_value <= 1.0;
}

void require_u(double u) {
  if (!(u >= 1.0) || !std::isfinite(u)) throw DomainError("u must be at least 1");
}

}  // namespace

HypothesisReport check_hypotheses(const CorrelationModel& model, double u, std::span<const double> grid) {
  require_u(u);
  if (grid.empty()) throw PreconditionError("check_hypotheses: empty grid");
  if (!std::is_sorted(grid.begin(), grid.end())) throw PreconditionError("check_hypotheses: grid must be sorted");
  HypothesisReport report;
  std::vector<std::size_t> indices(grid.size());
  for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
  scan(report, model, grid, indices);
  check_r1(report, model, u, grid.size() > 1 ? grid[1] - grid[0] : grid[0]);
  return report;
}

HypothesisReport check_lattice_hypotheses(const CorrelationModel& model, double u, double spacing,
                                          std::uint64_t n, std::uint64_t max_points) {
  require_u(u);
  if (n == 0 || !(spacing > 0.0)) throw PreconditionError("check_lattice_hypotheses: empty lattice");
  std::vector<std::uint64_t> ks;
  if (n <= max_points) {
    ks.resize(n);
    for (std::uint64_t k = 0; k < n; ++k) ks[k] = k;
  } else {
    const std::uint64_t half = max_points / 2;
    for (std::uint64_t k = 0; k < half; ++k) ks.push_back(k);
    const double ratio = std::pow(static_cast<double>(n - 1) / static_cast<double>(half), 1.0 / static_cast<double>(half));
    double x = static_cast<double>(half);
    for (std::uint64_t i = 0; i < half; ++i) {
      x *= ratio;
      ks.push_back(std::min<std::uint64_t>(n - 1, static_cast<std::uint64_t>(x)));
    }
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  }
  std::vector<double> times(ks.size());
  std::vector<std::size_t> indices(ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i) {
    times[i] = spacing * static_cast<double>(ks[i]);
    indices[i] = static_cast<std::size_t>(ks[i]);
  }
  HypothesisReport report;
  report.sampled = n > max_points;
  scan(report, model, times, indices);
  check_r1(report, model, u, spacing);
  return report;
}

std::vector<double> SamplingGrid::times() const {
  std::vector<double> out(points);
  for (std::uint64_t i = 0; i < points; ++i) out[i] = static_cast<double>(i + 1) * spacing;
  return out;
}

SamplingGrid prop2_grid(double alpha, double u, double b, double cap) {
  require_alpha(alpha);
  require_u(u);
  if (!(b >= 1.0 && b <= 100.0)) throw DomainError("prop2_grid: b must lie in [1, 100]");
  const double log_m = std::log(b * u * u * alpha / 2.0) / alpha;
  const double log10_m = log_m / std::log(10.0);
  if (log_m > std::log(cap)) throw CappedGridError("prop2_grid: grid size exceeds enumeration cap", log10_m);
  const double raw = std::pow(b * u * u * alpha / 2.0, 1.0 / alpha);
  // Absorb rounding just below an integer before taking the integer part.
  const auto m = static_cast<std::uint64_t>(std::floor(raw * (1.0 + 1e-13)));
  if (m < 2) throw PreconditionError("prop2_grid: u too small, M < 2");
  return SamplingGrid{m, 1.0 / static_cast<double>(m)};
}

}  // namespace pickands
