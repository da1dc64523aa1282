#pragma once

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "pickands/constants.hpp"
#include "pickands/covariance.hpp"
#include "pickands/monte_carlo.hpp"

namespace pickands {

struct Theorem1Params {};

/// Height C > 0, slope K >= 0, break index 1 <= N <= n-1.
struct Theorem2Params {
  double C;
  double K;
  std::size_t N;
};

/// delta[j-1] holds delta(j), j = 1..n-1.
struct Theorem3Params {
  std::vector<double> delta;
};

/// strict: every theorem1 hypothesis must hold.
/// relaxed: only monotonicity and non-negativity (what the conditioning and
/// comparison steps use); a failed r(1)(1+2u^{-2}) <= 1 is reported, not fatal.
enum class HypothesisPolicy { strict, relaxed };

struct BoundSpec {
  CorrelationModel model;
  double u = 1.0;
  std::size_t n = 2;
  /// Lag j means r(j * spacing); 0 selects model.default_spacing(n).
  double spacing = 0.0;
  std::variant<Theorem1Params, Theorem2Params, Theorem3Params> params = Theorem1Params{};
  ConstantPolicy constants = ConstantPolicy::explicit_proof();
  HypothesisPolicy hypotheses = HypothesisPolicy::strict;

  double effective_spacing() const { return spacing > 0.0 ? spacing : model.default_spacing(n); }
};

/// Gaussian random walk with increments alpha_j^2 and
/// cumulative[i-1] = r(n-i) / (1 - r(n-i)), i = 1..n-1.
struct WalkStructure {
  Eigen::VectorXd alphas_sq;
  Eigen::VectorXd cumulative;
};

/// `lags` holds r(0..n-1). Throws DegenerateError if r(m) = 1 for some m >= 1
/// and PreconditionError if the cumulative variances decrease.
WalkStructure build_walk(const Eigen::VectorXd& lags);
WalkStructure build_walk(const CorrelationModel& model, double spacing, std::size_t n);

/// Every factor of a bound, in logs, so the output can be audited.
struct BoundTerms {
  double log_prefactor = 0.0;       // log(constant * n e^{-u^2/2} / u)
  double log_walk = 0.0;            // theorem3 walk probability
  double log_height_factor = 0.0;   // theorem2: Phi((C/2 - K rho_N)/sqrt(rho_N))
  double log_slope_factor = 0.0;    // theorem2: min{1, C/(K rho_N)}
  double log_horizon_factor = 0.0;  // min{1, sqrt(C^2 (1-r(1))/r(1))} or its theorem1 form
  double log_phi_product = 0.0;
  Eigen::VectorXd phi_arguments;    // argument j-1 for lag j
  double log_value = 0.0;
  double value = 0.0;
  HypothesisReport hypotheses;
};

/// Lag values r(0..n-1) for the spec after checking hypotheses per its policy.
Eigen::VectorXd resolve_lags(const BoundSpec& spec, HypothesisReport* report = nullptr);

/// delta(i) = C/u - (K/u) min{rho(i), rho(N)}, rho(j) = r(j)/(1-r(j)).
std::vector<double> theorem2_delta(const Eigen::VectorXd& lags, double u, const Theorem2Params& params);

/// Phi arguments u sqrt(1-r(j)) (1 - delta(j) - r(j)/(u^2 (1-r(j)))).
Eigen::VectorXd theorem3_phi_arguments(const Eigen::VectorXd& lags, double u, const std::vector<double>& delta);

/// Sum of log Phi over the arguments.
double log_phi_product(const Eigen::VectorXd& arguments);

/// n e^{-u^2/2}/(12u) * walk_prob * prod Phi(theorem3 arguments). Needs
/// Theorem3Params; walk_prob is P(sum_{j<=i} alpha_j Y_j <= delta(n-i) u for all i).
BoundTerms theorem3_exact_bound(const BoundSpec& spec, double walk_prob);

/// theorem2 product; see ConstantPolicy for how each mode fills the constants.
BoundTerms theorem2_bound(const BoundSpec& spec);

/// n e^{-u^2/2}/(40u) min{1, sqrt((1-r(1))/(u^2 r(1)))} prod Phi(u sqrt(1-r(j)) (1 + E_j)).
BoundTerms theorem1_bound(const BoundSpec& spec);

/// Monte Carlo estimate of the exact discrete walk event.
struct WalkMonteCarlo {
  MCConfig mc;
};

/// lemma3 lower bound for the continuous-time event behind the theorem2
/// delta choice: boundary C - K min{s, rho(N)} on [0, rho(1)].
struct WalkBrownianBound {
  double C;
  double K;
  std::size_t N;
  ConstantPolicy constants = ConstantPolicy::calibrated();
};

struct WalkProbability {
  double value = 0.0;
  bool lower_bound = false;  // true in Brownian mode
  std::optional<MCEstimate> estimate;
};

WalkProbability walk_event_probability(const WalkStructure& walk, const std::vector<double>& delta, double u,
                                       const std::variant<WalkMonteCarlo, WalkBrownianBound>& method);

}  // namespace pickands
