#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "pickands/bounds.hpp"
#include "pickands/covariance.hpp"
#include "pickands/monte_carlo.hpp"

namespace pickands {

/// Symmetric Toeplitz matrix with first column `lags`.
template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> toeplitz_covariance(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& lags) {
  const Eigen::Index n = lags.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) out(i, j) = lags[i > j ? i - j : j - i];
  return out;
}

/// Sigma(i, k) = r(|t_i - t_k|).
Eigen::MatrixXd correlation_matrix(const CorrelationModel& model, std::span<const double> times);

/// Mean-zero normal vector with a fixed covariance and its lower Cholesky factor.
/// Immutable once built, so one ensemble can feed concurrent batches.
class GaussianEnsemble {
 public:
  /// Tries jitter 0, 1e-12, ..., 1e-8 on the diagonal; throws FactorizationError
  /// naming `label` if none gives ||L L^T - Sigma||_max <= 1e-8.
  GaussianEnsemble(Eigen::MatrixXd covariance, const std::string& label = "covariance");

  const Eigen::MatrixXd& covariance() const noexcept { return covariance_; }
  const Eigen::MatrixXd& factor() const noexcept { return factor_; }
  double jitter_used() const noexcept { return jitter_; }
  double residual() const noexcept { return residual_; }
  Eigen::Index size() const noexcept { return covariance_.rows(); }

  /// `count` draws as the columns of an n x count matrix.
  Eigen::MatrixXd sample(Rng& rng, Eigen::Index count) const;

 private:
  Eigen::MatrixXd covariance_;
  Eigen::MatrixXd factor_;
  double jitter_ = 0.0;
  double residual_ = 0.0;
};

inline constexpr std::size_t kMaxEnsembleSize = 5000;
inline constexpr double kMinExpectedHits = 50.0;

/// P(max_i Z(t_i) > u). Rejects n > kMaxEnsembleSize and sample sizes whose
/// expected hit count (bounded below by samples (1 - Phi(u))) is under 50.
MCEstimate sample_max_exceedance(const CorrelationModel& model, std::span<const double> times, double u,
                                 const MCConfig& cfg);

/// Analytic E V_j V_k for V_j = (Z_j - c_j Z_n)/sqrt(1 - c_j^2), c_j = E Z_j Z_n,
/// j = 1..n-1. Throws DegenerateError if some c_j = 1.
struct ConditionedView {
  Eigen::MatrixXd v_correlations;
};
ConditionedView conditioned_correlations(const CorrelationModel& model, std::span<const double> times);

/// Off-diagonal c_min (1 - c_max) / (sqrt(1-c_j^2) sqrt(1-c_k^2)) with
/// min/max taken over the indices; unit diagonal.
Eigen::MatrixXd comparison_correlations(const CorrelationModel& model, std::span<const double> times);

struct ConditioningReport {
  double max_abs_correlation_error = 0.0;
  double max_abs_cross_with_last = 0.0;  // max_j |E V_j Z_n|
  double tolerance = 0.02;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  bool pass() const noexcept {
    return max_abs_correlation_error <= tolerance && max_abs_cross_with_last <= tolerance;
  }
};

/// Samples Z, forms V and compares empirical moments with the analytic ones.
ConditioningReport conditioning_check(const CorrelationModel& model, std::span<const double> times,
                                      const MCConfig& cfg, double tolerance = 0.02);

struct ComparisonReport {
  bool entrywise_holds = true;
  double min_entry_gap = 0.0;  // min over j != k of E V_j V_k - comparison entry
  Eigen::VectorXd thresholds;  // u sqrt((1-c_j)/(1+c_j))
  MCEstimate v_orthant;        // P(V_j <= thresholds_j for all j)
  MCEstimate x_orthant;        // same event for the comparison vector X
  bool mc_violation = false;   // v_orthant.ci_high < x_orthant.ci_low
  bool pass() const noexcept { return entrywise_holds && !mc_violation; }
};

/// X is built directly as X_j = (sqrt(d_j) xi_j + d_j S_j)/sqrt(1-c_j^2) with
/// d_j = 1 - c_j and S the walk with Var S_j = c_j/d_j, so the walk
/// representation is exercised as well. Needs c_j nondecreasing in j.
ComparisonReport slepian_comparison_check(const CorrelationModel& model, std::span<const double> times, double u,
                                          const MCConfig& cfg, double entry_tolerance = 1e-12);

struct WalkIdentityReport {
  double max_abs_deviation = 0.0;         // raw covariance scale
  double max_normalized_deviation = 0.0;  // divided by sqrt(cum_i cum_k)
  double tolerance = 0.02;
  std::uint64_t samples = 0;
  bool pass() const noexcept { return max_normalized_deviation <= tolerance; }
};

/// Empirical covariance of the partial sums against min(cumulative_i, cumulative_k).
WalkIdentityReport walk_identity_check(const WalkStructure& walk, const MCConfig& cfg, double tolerance = 0.02);

struct ChainCheck {
  std::string name;
  bool pass = true;
  bool informational = false;  // reported, does not decide the chain
  double lhs = 0.0;
  double rhs = 0.0;
  std::string detail;
};

struct ChainReport {
  std::vector<ChainCheck> checks;
  MCEstimate exceedance;
  MCEstimate walk;
  BoundTerms theorem3;
  BoundTerms theorem2;
  BoundTerms theorem1;
  Theorem2Params params{};
  bool pass() const noexcept;
};

struct ChainOptions {
  CorrelationModel model = CorrelationModel::exponential(1.0);
  double u = 3.0;
  std::size_t n = 10;
  double spacing = 0.0;  // 0: model default
  /// theorem2 parameters; unset picks the prop2 (u alpha, kappa*/(u alpha),
  /// Y^{1/alpha}) for Shao models and (1/u, 0, 1) otherwise.
  std::optional<Theorem2Params> params;
  MCConfig mc;
  std::uint64_t check_samples = 100000;  // conditioning / Slepian / walk checks
  bool run_auxiliary = true;
};

/// Every step of the conditioning -> comparison -> walk chain, plus the
/// final inequality theorem3_exact_bound <= upper CI of P(max > u).
ChainReport verify_chain(const ChainOptions& options);

}  // namespace pickands
