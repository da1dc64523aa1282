#include "pickands/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pickands/bm_boundary.hpp"
#include "pickands/errors.hpp"
#include "pickands/special_functions.hpp"

namespace pickands {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double rho(double r) { return r / (1.0 - r); }

double safe_log(double x) { return x > 0.0 ? std::log(x) : kNegInf; }

double log_base_prefactor(double u, std::size_t n) {
  return std::log(static_cast<double>(n)) - 0.5 * u * u - std::log(u);
}

void require_nondegenerate(const Eigen::VectorXd& lags) {
  for (Eigen::Index m = 1; m < lags.size(); ++m)
    if (lags[m] >= 1.0) throw DegenerateError("correlation equals 1 at a positive lag; walk is undefined");
}

// log of min{1, C/(K rho_N)} Phi((C/2 - K rho_N)/sqrt(rho_N)) min{1, C/sqrt(rho_1)},
// with the limiting values at rho_N = 0 or rho_1 = 0 and K = 0.
double log_lemma3_walk_shape(double C, double K, double rho_N, double rho_1) {
  if (rho_1 <= 0.0) return 0.0;
  if (rho_N <= 0.0) return std::log(std::min(1.0, C / std::sqrt(rho_1)));
  return lemma3_log_shape(C, -K, rho_N, rho_1);
}

struct Theorem2Factors {
  double height;
  double slope;
  double horizon;
};

Theorem2Factors theorem2_factors(const Eigen::VectorXd& lags, const Theorem2Params& p) {
  const double rho_N = rho(lags[static_cast<Eigen::Index>(p.N)]);
  const double r1 = lags[1];
  Theorem2Factors f{0.0, 0.0, 0.0};
  if (rho_N > 0.0) {
    f.height = log_normal_cdf((0.5 * p.C - p.K * rho_N) / std::sqrt(rho_N));
    if (p.K > 0.0) f.slope = std::log(std::min(1.0, p.C / (p.K * rho_N)));
  }
  if (r1 > 0.0) f.horizon = std::log(std::min(1.0, std::sqrt(p.C * p.C * (1.0 - r1) / r1)));
  return f;
}

// E_j: the big-Oh term inside each Phi argument, relative to u sqrt(1-r(j)).
double big_oh_term(const ConstantPolicy& constants, double r, double u) {
  if (constants.mode == ConstantMode::explicit_proof) return -r / (u * u * (1.0 - r));
  return -constants.big_oh_constant / (u * u * (1.0 - r));
}

void finish(BoundTerms& terms) {
  terms.log_phi_product = log_phi_product(terms.phi_arguments);
  terms.log_value = terms.log_prefactor + terms.log_walk + terms.log_height_factor + terms.log_slope_factor +
                    terms.log_horizon_factor + terms.log_phi_product;
  terms.value = std::exp(terms.log_value);
}

void validate_theorem2(const Theorem2Params& p, std::size_t n) {
  if (!(p.C > 0.0) || !std::isfinite(p.C)) throw DomainError("theorem2 needs C > 0");
  if (!(p.K >= 0.0) || !std::isfinite(p.K)) throw DomainError("theorem2 needs K >= 0");
  if (p.N < 1 || p.N > n - 1) throw DomainError("theorem2 needs 1 <= N <= n-1");
}

}  // namespace

WalkStructure build_walk(const Eigen::VectorXd& lags) {
  const Eigen::Index n = lags.size();
  if (n < 2) throw PreconditionError("walk needs n >= 2");
  require_nondegenerate(lags);
  WalkStructure walk;
  walk.cumulative.resize(n - 1);
  walk.alphas_sq.resize(n - 1);
  for (Eigen::Index i = 1; i <= n - 1; ++i) walk.cumulative[i - 1] = rho(lags[n - i]);
  double previous = 0.0;
  for (Eigen::Index i = 0; i < n - 1; ++i) {
    const double inc = walk.cumulative[i] - previous;
    if (inc < -1e-12 * std::max(1.0, std::abs(previous)))
      throw PreconditionError("walk cumulative variances decrease; r is not nonincreasing");
    walk.alphas_sq[i] = std::max(0.0, inc);
    previous = walk.cumulative[i];
  }
  return walk;
}

WalkStructure build_walk(const CorrelationModel& model, double spacing, std::size_t n) {
  return build_walk(correlation_lags(model, spacing, n));
}

Eigen::VectorXd resolve_lags(const BoundSpec& spec, HypothesisReport* report) {
  if (spec.n < 2) throw DomainError("bounds need n >= 2");
  const double spacing = spec.effective_spacing();
  const HypothesisReport hyp = check_lattice_hypotheses(spec.model, spec.u, spacing, spec.n);
  if (report) *report = hyp;
  if (spec.hypotheses == HypothesisPolicy::strict && !hyp.all_pass())
    throw PreconditionError("correlation model fails the theorem1 hypotheses (strict policy)");
  if (!hyp.chain_pass()) throw PreconditionError("correlation must be nonincreasing and non-negative");
  Eigen::VectorXd lags = correlation_lags(spec.model, spacing, spec.n);
  require_nondegenerate(lags);
  return lags;
}

std::vector<double> theorem2_delta(const Eigen::VectorXd& lags, double u, const Theorem2Params& params) {
  const auto n = static_cast<std::size_t>(lags.size());
  validate_theorem2(params, n);
  const double rho_N = rho(lags[static_cast<Eigen::Index>(params.N)]);
  std::vector<double> delta(n - 1);
  for (std::size_t j = 1; j < n; ++j)
    delta[j - 1] = params.C / u - (params.K / u) * std::min(rho(lags[static_cast<Eigen::Index>(j)]), rho_N);
  return delta;
}

Eigen::VectorXd theorem3_phi_arguments(const Eigen::VectorXd& lags, double u, const std::vector<double>& delta) {
  const Eigen::Index n = lags.size();
  if (static_cast<Eigen::Index>(delta.size()) != n - 1) throw PreconditionError("delta must have n-1 entries");
  Eigen::VectorXd args(n - 1);
  for (Eigen::Index j = 1; j < n; ++j) {
    const double r = lags[j];
    args[j - 1] = u * std::sqrt(1.0 - r) * (1.0 - delta[static_cast<std::size_t>(j - 1)] - r / (u * u * (1.0 - r)));
  }
  return args;
}

double log_phi_product(const Eigen::VectorXd& arguments) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < arguments.size(); ++j) sum += log_normal_cdf(arguments[j]);
  return sum;
}

BoundTerms theorem3_exact_bound(const BoundSpec& spec, double walk_prob) {
  const auto* params = std::get_if<Theorem3Params>(&spec.params);
  if (!params) throw PreconditionError("theorem3_exact_bound needs Theorem3Params");
  if (!(walk_prob >= 0.0 && walk_prob <= 1.0)) throw DomainError("walk probability must lie in [0, 1]");
  BoundTerms terms;
  const Eigen::VectorXd lags = resolve_lags(spec, &terms.hypotheses);
  terms.log_prefactor = log_base_prefactor(spec.u, spec.n) - std::log(12.0);
  terms.log_walk = safe_log(walk_prob);
  terms.phi_arguments = theorem3_phi_arguments(lags, spec.u, params->delta);
  finish(terms);
  return terms;
}

BoundTerms theorem2_bound(const BoundSpec& spec) {
  const auto* params = std::get_if<Theorem2Params>(&spec.params);
  if (!params) throw PreconditionError("theorem2_bound needs Theorem2Params");
  validate_theorem2(*params, spec.n);
  BoundTerms terms;
  const Eigen::VectorXd lags = resolve_lags(spec, &terms.hypotheses);
  const double u = spec.u;
  const double rho_N = rho(lags[static_cast<Eigen::Index>(params->N)]);

  terms.log_prefactor = log_base_prefactor(u, spec.n) + std::log(spec.constants.theorem2_prefactor) +
                        std::log(spec.constants.lemma3);
  const Theorem2Factors f = theorem2_factors(lags, *params);
  terms.log_height_factor = f.height;
  terms.log_slope_factor = f.slope;
  terms.log_horizon_factor = f.horizon;

  const Eigen::Index n = lags.size();
  terms.phi_arguments.resize(n - 1);
  for (Eigen::Index j = 1; j < n; ++j) {
    const double r = lags[j];
    const double shift = -params->C / u + (params->K / u) * std::min(rho(r), rho_N);
    terms.phi_arguments[j - 1] = u * std::sqrt(1.0 - r) * (1.0 + shift + big_oh_term(spec.constants, r, u));
  }
  finish(terms);
  return terms;
}

BoundTerms theorem1_bound(const BoundSpec& spec) {
  if (!std::holds_alternative<Theorem1Params>(spec.params)) throw PreconditionError("theorem1_bound needs Theorem1Params");
  BoundTerms terms;
  const Eigen::VectorXd lags = resolve_lags(spec, &terms.hypotheses);
  const double u = spec.u;
  terms.log_prefactor = log_base_prefactor(u, spec.n) - std::log(40.0);
  const double r1 = lags[1];
  if (r1 > 0.0) terms.log_horizon_factor = std::log(std::min(1.0, std::sqrt((1.0 - r1) / (u * u * r1))));
  const Eigen::Index n = lags.size();
  terms.phi_arguments.resize(n - 1);
  for (Eigen::Index j = 1; j < n; ++j) {
    const double r = lags[j];
    terms.phi_arguments[j - 1] = u * std::sqrt(1.0 - r) * (1.0 + big_oh_term(spec.constants, r, u));
  }
  finish(terms);
  return terms;
}

WalkProbability walk_event_probability(const WalkStructure& walk, const std::vector<double>& delta, double u,
                                       const std::variant<WalkMonteCarlo, WalkBrownianBound>& method) {
  const Eigen::Index steps = walk.cumulative.size();
  if (static_cast<Eigen::Index>(delta.size()) != steps) throw PreconditionError("delta must have n-1 entries");
  const auto n = static_cast<std::size_t>(steps + 1);

  if (const auto* bm = std::get_if<WalkBrownianBound>(&method)) {
    if (bm->N < 1 || bm->N > n - 1) throw DomainError("walk bound needs 1 <= N <= n-1");
    if (!(bm->C > 0.0) || bm->K < 0.0) throw DomainError("walk bound needs C > 0 and K >= 0");
    const double rho_1 = walk.cumulative[steps - 1];
    const double rho_N = walk.cumulative[static_cast<Eigen::Index>(n - bm->N - 1)];
    WalkProbability out;
    out.lower_bound = true;
    out.value = std::min(1.0, bm->constants.lemma3 * std::exp(log_lemma3_walk_shape(bm->C, bm->K, rho_N, rho_1)));
    return out;
  }

  const auto& mc = std::get<WalkMonteCarlo>(method).mc;
  if (!(walk.cumulative[steps - 1] > 0.0)) throw PreconditionError("walk Monte Carlo needs positive total variance");
  std::vector<double> sd(static_cast<std::size_t>(steps));
  std::vector<double> threshold(static_cast<std::size_t>(steps));
  for (Eigen::Index i = 0; i < steps; ++i) {
    sd[static_cast<std::size_t>(i)] = std::sqrt(walk.alphas_sq[i]);
    // step i+1 of the walk is compared with delta(n-(i+1)) u
    threshold[static_cast<std::size_t>(i)] = delta[static_cast<std::size_t>(steps - 1 - i)] * u;
  }
  WalkProbability out;
  out.estimate = estimate_probability(mc, [&](Rng& rng) {
    NormalSampler normal;
    double s = 0.0;
    for (std::size_t i = 0; i < sd.size(); ++i) {
      s += sd[i] * normal(rng);
      if (s > threshold[i]) return false;
    }
    return true;
  });
  out.value = out.estimate->mean;
  return out;
}

}  // namespace pickands
