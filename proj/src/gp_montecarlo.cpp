#include "pickands/gp_montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Cholesky>

#include "pickands/errors.hpp"
#include "pickands/pickands_optimizer.hpp"
#include "pickands/special_functions.hpp"

namespace pickands {

namespace {

constexpr double kFactorTolerance = 1e-8;

void fill_normals(Eigen::MatrixXd& m, Rng& rng) {
  NormalSampler normal;
  double* p = m.data();
  for (Eigen::Index i = 0; i < m.size(); ++i) p[i] = normal(rng);
}

// c_j = E Z_j Z_n for j = 1..n-1, checked to be < 1.
Eigen::VectorXd last_correlations(const Eigen::MatrixXd& sigma) {
  const Eigen::Index n = sigma.rows();
  if (n < 2) throw PreconditionError("conditioning needs at least two grid points");
  Eigen::VectorXd c = sigma.col(n - 1).head(n - 1);
  for (Eigen::Index j = 0; j < n - 1; ++j)
    if (!(std::abs(c[j]) < 1.0))
      throw DegenerateError("correlation with the last grid point equals 1; V is undefined");
  return c;
}

Eigen::VectorXd conditioning_scales(const Eigen::VectorXd& c) {
  return (1.0 - c.array().square()).sqrt().matrix();
}

std::vector<double> sorted_times(std::span<const double> times) {
  std::vector<double> t(times.begin(), times.end());
  if (!std::is_sorted(t.begin(), t.end())) throw PreconditionError("grid times must be sorted");
  return t;
}

// V = (Z_top - c Z_n) / s, column-wise.
Eigen::MatrixXd conditioned_sample(const Eigen::MatrixXd& z, const Eigen::VectorXd& c, const Eigen::VectorXd& s) {
  const Eigen::Index m = c.size();
  Eigen::MatrixXd v = z.topRows(m) - c * z.row(m);
  return s.cwiseInverse().asDiagonal() * v;
}

std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t stream) { return batch_seed(seed ^ 0x9e3779b97f4a7c15ULL, stream); }

}  // namespace

Eigen::MatrixXd correlation_matrix(const CorrelationModel& model, std::span<const double> times) {
  const auto n = static_cast<Eigen::Index>(times.size());
  Eigen::MatrixXd sigma(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    sigma(j, j) = 1.0;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double r = model(std::abs(times[static_cast<std::size_t>(i)] - times[static_cast<std::size_t>(j)]));
      sigma(i, j) = r;
      sigma(j, i) = r;
    }
  }
  return sigma;
}

GaussianEnsemble::GaussianEnsemble(Eigen::MatrixXd covariance, const std::string& label)
    : covariance_(std::move(covariance)) {
  if (covariance_.rows() != covariance_.cols() || covariance_.rows() == 0)
    throw PreconditionError(label + ": covariance must be a non-empty square matrix");
  for (double jitter : {0.0, 1e-12, 1e-11, 1e-10, 1e-9, 1e-8}) {
    Eigen::MatrixXd shifted = covariance_;
    shifted.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    if (llt.info() != Eigen::Success) continue;
    Eigen::MatrixXd l = llt.matrixL();
    const double residual = (l * l.transpose() - covariance_).cwiseAbs().maxCoeff();
    if (residual <= kFactorTolerance) {
      factor_ = std::move(l);
      jitter_ = jitter;
      residual_ = residual;
      return;
    }
  }
  throw FactorizationError(label + ": Cholesky factorization failed after jitter 1e-8");
}

Eigen::MatrixXd GaussianEnsemble::sample(Rng& rng, Eigen::Index count) const {
  Eigen::MatrixXd g(size(), count);
  fill_normals(g, rng);
  return factor_.triangularView<Eigen::Lower>() * g;
}

MCEstimate sample_max_exceedance(const CorrelationModel& model, std::span<const double> times, double u,
                                 const MCConfig& cfg) {
  const std::size_t n = times.size();
  if (n == 0) throw PreconditionError("empty grid");
  if (n > kMaxEnsembleSize) throw PreconditionError("grid too large for a dense factorization (n > 5000)");
  if (static_cast<double>(cfg.samples) * (1.0 - normal_cdf(u)) < kMinExpectedHits)
    throw PreconditionError("too few samples: expected exceedance count below 50");
  const GaussianEnsemble ensemble(correlation_matrix(model, sorted_times(times)), model.describe());

  const auto counts = run_batches(cfg, [&](Batch& b) {
    const Eigen::MatrixXd z = ensemble.sample(b.rng, static_cast<Eigen::Index>(b.count));
    std::uint64_t hits = 0;
    for (Eigen::Index k = 0; k < z.cols(); ++k) hits += z.col(k).maxCoeff() > u ? 1 : 0;
    return hits;
  });
  std::uint64_t hits = 0;
  for (auto c : counts) hits += c;
  return make_estimate(hits, cfg.samples, cfg);
}

ConditionedView conditioned_correlations(const CorrelationModel& model, std::span<const double> times) {
  const Eigen::MatrixXd sigma = correlation_matrix(model, sorted_times(times));
  const Eigen::VectorXd c = last_correlations(sigma);
  const Eigen::VectorXd s = conditioning_scales(c);
  const Eigen::Index m = c.size();
  Eigen::MatrixXd v = (sigma.topLeftCorner(m, m) - c * c.transpose()).array() / (s * s.transpose()).array();
  v.diagonal().setOnes();
  return {v};
}

Eigen::MatrixXd comparison_correlations(const CorrelationModel& model, std::span<const double> times) {
  const Eigen::MatrixXd sigma = correlation_matrix(model, sorted_times(times));
  const Eigen::VectorXd c = last_correlations(sigma);
  const Eigen::VectorXd s = conditioning_scales(c);
  const Eigen::Index m = c.size();
  Eigen::MatrixXd x(m, m);
  for (Eigen::Index k = 0; k < m; ++k)
    for (Eigen::Index j = 0; j < m; ++j) {
      if (j == k) {
        x(j, k) = 1.0;
        continue;
      }
      const Eigen::Index lo = std::min(j, k);
      const Eigen::Index hi = std::max(j, k);
      x(j, k) = c[lo] * (1.0 - c[hi]) / (s[j] * s[k]);
    }
  return x;
}

ConditioningReport conditioning_check(const CorrelationModel& model, std::span<const double> times,
                                      const MCConfig& cfg, double tolerance) {
  const Eigen::MatrixXd sigma = correlation_matrix(model, sorted_times(times));
  const Eigen::VectorXd c = last_correlations(sigma);
  const Eigen::VectorXd s = conditioning_scales(c);
  const Eigen::MatrixXd analytic = conditioned_correlations(model, times).v_correlations;
  const GaussianEnsemble ensemble(sigma, model.describe());
  const Eigen::Index m = c.size();

  struct Moments {
    Eigen::MatrixXd vv;
    Eigen::VectorXd vz;
  };
  const auto parts = run_batches(cfg, [&](Batch& b) {
    const Eigen::MatrixXd z = ensemble.sample(b.rng, static_cast<Eigen::Index>(b.count));
    const Eigen::MatrixXd v = conditioned_sample(z, c, s);
    return Moments{v * v.transpose(), v * z.row(m).transpose()};
  });
  Eigen::MatrixXd vv = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd vz = Eigen::VectorXd::Zero(m);
  for (const auto& p : parts) {
    vv += p.vv;
    vz += p.vz;
  }
  const double count = static_cast<double>(cfg.samples);
  vv /= count;
  vz /= count;
  const Eigen::VectorXd sd = vv.diagonal().cwiseSqrt();
  const Eigen::MatrixXd empirical = vv.array() / (sd * sd.transpose()).array();

  ConditioningReport out;
  out.max_abs_correlation_error = (empirical - analytic).cwiseAbs().maxCoeff();
  out.max_abs_cross_with_last = vz.cwiseAbs().maxCoeff();
  out.tolerance = tolerance;
  out.samples = cfg.samples;
  out.seed = cfg.seed;
  return out;
}

ComparisonReport slepian_comparison_check(const CorrelationModel& model, std::span<const double> times, double u,
                                          const MCConfig& cfg, double entry_tolerance) {
  const Eigen::MatrixXd sigma = correlation_matrix(model, sorted_times(times));
  const Eigen::VectorXd c = last_correlations(sigma);
  const Eigen::VectorXd s = conditioning_scales(c);
  const Eigen::Index m = c.size();
  for (Eigen::Index j = 1; j < m; ++j)
    if (c[j] < c[j - 1]) throw PreconditionError("comparison needs E Z_j Z_n nondecreasing in j");
  if (c.minCoeff() < 0.0) throw PreconditionError("comparison needs non-negative correlations");

  ComparisonReport out;
  const Eigen::MatrixXd v_corr = conditioned_correlations(model, times).v_correlations;
  const Eigen::MatrixXd x_corr = comparison_correlations(model, times);
  Eigen::MatrixXd gap = v_corr - x_corr;
  gap.diagonal().setConstant(std::numeric_limits<double>::infinity());
  out.min_entry_gap = m > 1 ? gap.minCoeff() : 0.0;
  out.entrywise_holds = out.min_entry_gap >= -entry_tolerance;

  out.thresholds = (u * ((1.0 - c.array()) / (1.0 + c.array())).sqrt()).matrix();
  const GaussianEnsemble ensemble(sigma, model.describe());
  out.v_orthant = estimate_probability_block(cfg, [&](Rng& rng, Eigen::Index count) {
    const Eigen::MatrixXd v = conditioned_sample(ensemble.sample(rng, count), c, s);
    std::uint64_t hits = 0;
    for (Eigen::Index k = 0; k < count; ++k) hits += (v.col(k).array() <= out.thresholds.array()).all() ? 1 : 0;
    return hits;
  });

  // X_j = (sqrt(d_j) xi_j + d_j S_j) / s_j with Var S_j = c_j / d_j
  const Eigen::VectorXd d = (1.0 - c.array()).matrix();
  Eigen::VectorXd increments_sd(m);
  double previous = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    const double rho = c[j] / d[j];
    increments_sd[j] = std::sqrt(std::max(0.0, rho - previous));
    previous = rho;
  }
  MCConfig x_cfg = cfg;
  x_cfg.seed = derived_seed(cfg.seed, 1);
  out.x_orthant = estimate_probability(x_cfg, [&](Rng& rng) {
    NormalSampler normal;
    double walk = 0.0;
    bool inside = true;
    for (Eigen::Index j = 0; j < m; ++j) {
      walk += increments_sd[j] * normal(rng);
      const double x = (std::sqrt(d[j]) * normal(rng) + d[j] * walk) / s[j];
      inside = inside && x <= out.thresholds[j];
    }
    return inside;
  });
  out.mc_violation = out.v_orthant.ci_high < out.x_orthant.ci_low;
  return out;
}

WalkIdentityReport walk_identity_check(const WalkStructure& walk, const MCConfig& cfg, double tolerance) {
  const Eigen::Index m = walk.alphas_sq.size();
  if (m == 0) throw PreconditionError("empty walk");
  if (walk.alphas_sq.minCoeff() < 0.0) throw PreconditionError("walk increments must be non-negative");
  const Eigen::VectorXd sd = walk.alphas_sq.cwiseSqrt();
  const auto parts = run_batches(cfg, [&](Batch& b) {
    Eigen::MatrixXd y(m, static_cast<Eigen::Index>(b.count));
    fill_normals(y, b.rng);
    Eigen::MatrixXd partial = sd.asDiagonal() * y;
    for (Eigen::Index i = 1; i < m; ++i) partial.row(i) += partial.row(i - 1);
    return Eigen::MatrixXd(partial * partial.transpose());
  });
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(m, m);
  for (const auto& p : parts) cov += p;
  cov /= static_cast<double>(cfg.samples);

  // cumulative variances from the increments, so the check does not depend on rounding in `cumulative`
  Eigen::VectorXd cum(m);
  double total = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) cum[i] = total += walk.alphas_sq[i];

  WalkIdentityReport out;
  out.tolerance = tolerance;
  out.samples = cfg.samples;
  for (Eigen::Index k = 0; k < m; ++k)
    for (Eigen::Index i = 0; i < m; ++i) {
      const double expected = std::min(cum[i], cum[k]);
      const double dev = std::abs(cov(i, k) - expected);
      out.max_abs_deviation = std::max(out.max_abs_deviation, dev);
      const double scale = std::sqrt(cum[i] * cum[k]);
      if (scale > 0.0) out.max_normalized_deviation = std::max(out.max_normalized_deviation, dev / scale);
    }
  return out;
}

bool ChainReport::pass() const noexcept {
  return std::all_of(checks.begin(), checks.end(), [](const ChainCheck& c) { return c.informational || c.pass; });
}

ChainReport verify_chain(const ChainOptions& options) {
  const double u = options.u;
  const std::size_t n = options.n;
  if (!(u >= 1.0)) throw DomainError("verify chain needs u >= 1");
  if (n < 2) throw DomainError("verify chain needs n >= 2");
  const double spacing = options.spacing > 0.0 ? options.spacing : options.model.default_spacing(n);
  std::vector<double> times(n);
  for (std::size_t i = 0; i < n; ++i) times[i] = static_cast<double>(i + 1) * spacing;

  ChainReport report;
  if (options.params) {
    report.params = *options.params;
  } else if (const auto* shao = std::get_if<ShaoKind>(&options.model.kind())) {
    const Prop2Parameters p = prop2_parameters(shao->alpha, u, n, optimize());
    report.params = {p.C, p.K, p.N};
  } else {
    report.params = {1.0 / u, 0.0, 1};
  }

  BoundSpec spec{options.model, u, n, spacing};
  spec.hypotheses = HypothesisPolicy::relaxed;
  spec.constants = ConstantPolicy::explicit_proof();
  HypothesisReport hyp;
  const Eigen::VectorXd lags = resolve_lags(spec, &hyp);
  {
    std::ostringstream detail;
    detail << "monotone=" << hyp.monotone_nonincreasing << " nonnegative=" << hyp.nonnegative
           << " r1_condition=" << hyp.r1_condition;
    report.checks.push_back({"hypotheses", hyp.all_pass(), true, hyp.r1_value, 1.0, detail.str()});
  }

  const std::vector<double> delta = theorem2_delta(lags, u, report.params);
  const WalkStructure walk = build_walk(lags);
  MCConfig walk_cfg = options.mc;
  walk_cfg.seed = derived_seed(options.mc.seed, 2);
  const WalkProbability walk_prob =
      walk.cumulative[walk.cumulative.size() - 1] > 0.0
          ? walk_event_probability(walk, delta, u, WalkMonteCarlo{walk_cfg})
          : WalkProbability{std::all_of(delta.begin(), delta.end(), [](double x) { return x >= 0.0; }) ? 1.0 : 0.0,
                            false, std::nullopt};
  report.walk = walk_prob.estimate.value_or(MCEstimate{walk_prob.value, walk_prob.value, walk_prob.value, 0,
                                                       walk_cfg.seed, 0});

  spec.params = Theorem3Params{delta};
  report.theorem3 = theorem3_exact_bound(spec, walk_prob.value);
  spec.params = report.params;
  report.theorem2 = theorem2_bound(spec);
  spec.params = Theorem1Params{};
  report.theorem1 = theorem1_bound(spec);

  report.exceedance = sample_max_exceedance(options.model, times, u, options.mc);

  report.checks.push_back({"theorem3_le_exceedance", report.theorem3.value <= report.exceedance.ci_high, false,
                           report.theorem3.value, report.exceedance.ci_high,
                           "theorem3 (explicit constants, MC walk mean) vs upper 99% CI of P(max > u)"});
  report.checks.push_back({"theorem1_le_exceedance", report.theorem1.value <= report.exceedance.ci_high, true,
                           report.theorem1.value, report.exceedance.ci_high, "theorem1, explicit constants"});

  const double phi_gap = std::abs(report.theorem2.log_phi_product - report.theorem3.log_phi_product);
  report.checks.push_back({"delta_consistency", phi_gap <= 1e-10, false, report.theorem2.log_phi_product,
                           report.theorem3.log_phi_product, "theorem2 vs theorem3 log Phi-product"});

  {
    // calibrated theorem2 replaces the walk by a lemma3 bound for the continuous
    // event, which the discrete walk event contains
    BoundSpec calibrated = spec;
    calibrated.params = report.params;
    calibrated.constants = ConstantPolicy::calibrated();
    const BoundTerms t2 = theorem2_bound(calibrated);
    spec.params = Theorem3Params{delta};
    const double upper_walk = report.walk.samples ? report.walk.ci_high : report.walk.mean;
    const BoundTerms t3 = theorem3_exact_bound(spec, upper_walk);
    report.checks.push_back({"theorem2_le_theorem3", t2.log_value <= t3.log_value, false, t2.value, t3.value,
                             "theorem2 (calibrated) vs theorem3 at the walk upper CI"});
  }

  if (options.run_auxiliary) {
    MCConfig aux = options.mc;
    aux.samples = options.check_samples;
    aux.seed = derived_seed(options.mc.seed, 3);
    const ConditioningReport cond = conditioning_check(options.model, times, aux);
    report.checks.push_back({"conditioning", cond.pass(), false, cond.max_abs_correlation_error, cond.tolerance,
                             "max |empirical - analytic| E V_j V_k; max |E V_j Z_n| = " +
                                 std::to_string(cond.max_abs_cross_with_last)});

    aux.seed = derived_seed(options.mc.seed, 4);
    const ComparisonReport cmp = slepian_comparison_check(options.model, times, u, aux);
    report.checks.push_back({"slepian_entrywise", cmp.entrywise_holds, false, cmp.min_entry_gap, 0.0,
                             "min over j != k of E V_j V_k - comparison entry"});
    report.checks.push_back({"slepian_orthant", !cmp.mc_violation, false, cmp.v_orthant.mean, cmp.x_orthant.mean,
                             "P(V <= b) vs P(X <= b)"});

    if (walk.alphas_sq.sum() > 0.0) {
      aux.seed = derived_seed(options.mc.seed, 5);
      const WalkIdentityReport w = walk_identity_check(walk, aux);
      report.checks.push_back({"walk_identity", w.pass(), false, w.max_normalized_deviation, w.tolerance,
                               "raw max deviation " + std::to_string(w.max_abs_deviation)});
    }
  }
  return report;
}

}  // namespace pickands
