#include "pickands/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pickands/bm_boundary.hpp"
#include "pickands/bounds.hpp"
#include "pickands/constants.hpp"
#include "pickands/covariance.hpp"
#include "pickands/errors.hpp"
#include "pickands/gp_montecarlo.hpp"
#include "pickands/pickands_optimizer.hpp"

namespace pickands::cli {

namespace {

using json = nlohmann::ordered_json;

struct RunConfig {
  std::uint64_t seed = 0;
  std::uint64_t samples = 100000;
  unsigned threads = 0;
  std::string format = "json";
  std::string constants = "explicit";
  std::string output;
  std::string config;

  MCConfig mc() const {
    MCConfig cfg;
    cfg.seed = seed;
    cfg.samples = samples;
    cfg.threads = threads;
    return cfg;
  }
  ConstantPolicy policy() const { return policy_for(parse_constant_mode(constants)); }
};

struct ModelArgs {
  std::string model = "exponential";
  double alpha = 0.5;
  double rate = 1.0;
  std::string table;

  CorrelationModel make() const {
    if (model == "shao") return CorrelationModel::shao(alpha);
    if (model == "exponential") return CorrelationModel::exponential(rate);
    if (model == "table") {
      if (table.empty()) throw PreconditionError("--model table needs --table FILE");
      return load_table_csv(table);
    }
    throw PreconditionError("unknown model: " + model);
  }
};

json provenance(const RunConfig& rc, bool randomized) {
  json p;
  p["constants_mode"] = rc.constants;
  if (randomized) {
    p["seed"] = rc.seed;
    p["samples"] = rc.samples;
  } else {
    p["seed"] = nullptr;
    p["samples"] = nullptr;
  }
  return p;
}

json to_json(const MCEstimate& e) {
  return {{"mean", e.mean}, {"ci_low", e.ci_low}, {"ci_high", e.ci_high},
          {"samples", e.samples}, {"seed", e.seed}, {"hits", e.hits}};
}

json to_json(const HypothesisReport& h) {
  json j{{"monotone_nonincreasing", h.monotone_nonincreasing},
         {"nonnegative", h.nonnegative},
         {"r1_condition", h.r1_condition},
         {"r1_value", h.r1_value},
         {"sampled", h.sampled},
         {"all_pass", h.all_pass()}};
  auto witness = [](const std::optional<Violation>& v) -> json {
    if (!v) return nullptr;
    return {{"index", v->index}, {"time", v->time}, {"value", v->value}};
  };
  j["monotone_witness"] = witness(h.monotone_witness);
  j["nonnegative_witness"] = witness(h.nonnegative_witness);
  return j;
}

json to_json(const BoundTerms& t) {
  std::vector<double> args(t.phi_arguments.data(), t.phi_arguments.data() + t.phi_arguments.size());
  return {{"value", t.value},
          {"log_value", t.log_value},
          {"log_prefactor", t.log_prefactor},
          {"log_walk", t.log_walk},
          {"log_height_factor", t.log_height_factor},
          {"log_slope_factor", t.log_slope_factor},
          {"log_horizon_factor", t.log_horizon_factor},
          {"log_phi_product", t.log_phi_product},
          {"phi_arguments", args},
          {"hypotheses", to_json(t.hypotheses)}};
}

std::vector<double> read_delta_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open delta file: " + path);
  std::vector<double> out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find_last_of(',');
    const std::string field = comma == std::string::npos ? line : line.substr(comma + 1);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(field, &used));
    } catch (const std::exception&) {
      if (!first) throw PreconditionError("malformed delta file row: " + line);
    }
    first = false;
  }
  return out;
}

void add_model_options(CLI::App* cmd, ModelArgs& m) {
  cmd->add_option("--model", m.model, "shao | exponential | table")->capture_default_str();
  cmd->add_option("--alpha", m.alpha, "Shao exponent in (0, 2)")->capture_default_str();
  cmd->add_option("--rate", m.rate, "exponential decay rate")->capture_default_str();
  cmd->add_option("--table", m.table, "CSV with columns lag,r");
}

void add_mc_options(CLI::App* cmd, RunConfig& rc) {
  cmd->add_option("--samples", rc.samples, "Monte Carlo sample count")->capture_default_str();
  cmd->add_option("--seed", rc.seed, "base seed")->capture_default_str();
}

void add_constants_option(CLI::App* cmd, RunConfig& rc) {
  cmd->add_option("--constants", rc.constants, "shape | explicit | calibrated")->capture_default_str();
}

struct BmArgs {
  double a = 1.0;
  double b = 0.0;
  std::optional<double> t0;
  double t = 1.0;
  double H = 3.0;
  double step = 0.0;
};

void add_bm_options(CLI::App* cmd, BmArgs& bm) {
  cmd->add_option("--a", bm.a, "boundary height at 0")->capture_default_str();
  cmd->add_option("--b", bm.b, "boundary slope")->capture_default_str();
  cmd->add_option("--t", bm.t, "horizon")->capture_default_str();
}

struct BoundArgs {
  int theorem = 1;
  double u = 3.0;
  std::size_t n = 10;
  double spacing = 0.0;
  std::optional<double> C;
  std::optional<double> K;
  std::optional<std::size_t> N;
  std::string delta_file;
  std::string walk = "mc";
  std::string hypotheses = "strict";
};

struct ChainArgs {
  double u = 3.0;
  std::size_t n = 10;
  double spacing = 0.0;
  std::optional<double> C;
  std::optional<double> K;
  std::optional<std::size_t> N;
  std::uint64_t check_samples = 100000;
  bool no_aux = false;
};

struct CurveArgs {
  double alpha_min = 0.05;
  double alpha_max = 2.0;
  std::size_t points = 40;
  double c = 1.0;
};

std::optional<Theorem2Params> theorem2_from(const std::optional<double>& C, const std::optional<double>& K,
                                            const std::optional<std::size_t>& N) {
  if (!C && !K && !N) return std::nullopt;
  if (!C || !K || !N) throw PreconditionError("--C, --K and --N go together");
  return Theorem2Params{*C, *K, *N};
}

// Finds the deepest subcommand named by the leading positional tokens.
CLI::App* leaf_subcommand(CLI::App& app, const std::vector<std::string>& args) {
  CLI::App* level = &app;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& token = args[i];
    if (token.empty() || token[0] == '-') {
      // skip the value of an option given as "--name value"
      const CLI::Option* opt = token.find('=') == std::string::npos ? level->get_option_no_throw(token) : nullptr;
      if (opt && opt->get_expected_min() > 0) ++i;
      continue;
    }
    CLI::App* next = nullptr;
    for (CLI::App* sub : level->get_subcommands({}))
      if (sub->get_name() == token) next = sub;
    if (!next) break;
    level = next;
  }
  return level;
}

bool flag_present(const std::vector<std::string>& args, const std::string& name) {
  const std::string flag = "--" + name;
  return std::any_of(args.begin(), args.end(),
                     [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
}

std::optional<std::string> config_path(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return std::nullopt;
}

// Appends config entries the command line did not set, so flags win.
std::vector<std::string> merge_config(CLI::App& app, std::vector<std::string> args, std::ostream& err) {
  const auto path = config_path(args);
  if (!path) return args;
  std::ifstream in(*path);
  if (!in) throw PreconditionError("cannot open config file: " + *path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  CLI::App* leaf = leaf_subcommand(app, args);
  for (const auto& [key, value] : parse_config(buffer.str())) {
    if (key == "config" || flag_present(args, key)) continue;
    const CLI::Option* opt = leaf->get_option_no_throw("--" + key);
    if (!opt) opt = app.get_option_no_throw("--" + key);
    if (!opt) {
      err << "config: ignoring key '" << key << "' not used by this command\n";
      continue;
    }
    if (opt->get_expected_min() == 0) {
      if (value == "true" || value == "1") args.push_back("--" + key);
    } else {
      args.push_back("--" + key);
      args.push_back(value);
    }
  }
  return args;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> parse_config(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream in(text);
  std::string line;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw PreconditionError("config line without '=': " + line);
    std::string key = trim(line.substr(0, eq));
    if (key.rfind("--", 0) == 0) key = key.substr(2);
    out.emplace_back(key, trim(line.substr(eq + 1)));
  }
  return out;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lower bounds for Gaussian maxima and Pickands constants", "pickands"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig rc;
  app.add_option("--config", rc.config, "key=value file; command-line flags take precedence");
  app.add_option("--output", rc.output, "write the result here instead of stdout");
  app.add_option("--threads", rc.threads, "worker threads (0: all cores)")->capture_default_str();

  json result;
  bool contract_failed = false;
  std::function<void()> action;

  // bm
  auto* bm = app.add_subcommand("bm", "Brownian motion boundary non-crossing probabilities");
  bm->require_subcommand(1);
  BmArgs bma;

  auto* bm_exact = bm->add_subcommand("exact", "closed form for a line boundary");
  add_bm_options(bm_exact, bma);
  bm_exact->callback([&] {
    action = [&] {
      const LineBoundary line{bma.a, bma.b, bma.t};
      result = {{"a", bma.a}, {"b", bma.b}, {"t", bma.t}, {"value", exact_line_noncrossing(line)},
                {"log_value", log_line_noncrossing(line)}, {"provenance", provenance(rc, false)}};
    };
  });

  auto* bm_l1 = bm->add_subcommand("lemma1", "steep-line lower bound");
  add_bm_options(bm_l1, bma);
  add_constants_option(bm_l1, rc);
  bm_l1->callback([&] {
    action = [&] {
      const LineBoundary line{bma.a, bma.b, bma.t};
      const double bound = lemma1_lower_bound(line, rc.policy());
      result = {{"a", bma.a}, {"b", bma.b}, {"t", bma.t}, {"value", bound},
                {"exact", exact_line_noncrossing(line)}, {"provenance", provenance(rc, false)}};
    };
  });

  auto* bm_l2 = bm->add_subcommand("lemma2", "shallow-line lower bound");
  add_bm_options(bm_l2, bma);
  add_constants_option(bm_l2, rc);
  bm_l2->add_option("--H", bma.H, "bound on |b| sqrt(t)")->capture_default_str();
  bm_l2->callback([&] {
    action = [&] {
      const LineBoundary line{bma.a, bma.b, bma.t};
      const double bound = lemma2_lower_bound(line, bma.H, rc.policy());
      result = {{"a", bma.a}, {"b", bma.b}, {"t", bma.t}, {"H", bma.H}, {"value", bound},
                {"exact", exact_line_noncrossing(line)}, {"provenance", provenance(rc, false)}};
    };
  });

  auto* bm_l3 = bm->add_subcommand("lemma3", "piecewise (slope then flat) lower bound");
  add_bm_options(bm_l3, bma);
  add_constants_option(bm_l3, rc);
  bm_l3->add_option("--t0", bma.t0, "break time")->required();
  bm_l3->callback([&] {
    action = [&] {
      const PiecewiseBoundary pw{bma.a, bma.b, *bma.t0, bma.t};
      const double bound = lemma3_lower_bound(pw, rc.policy());
      result = {{"a", bma.a}, {"b", bma.b}, {"t0", *bma.t0}, {"t", bma.t}, {"value", bound},
                {"quadrature", piecewise_noncrossing_quadrature(pw)}, {"provenance", provenance(rc, false)}};
    };
  });

  auto* bm_mc = bm->add_subcommand("mc", "Euler-skeleton Monte Carlo estimate");
  add_bm_options(bm_mc, bma);
  add_mc_options(bm_mc, rc);
  bm_mc->add_option("--t0", bma.t0, "break time (piecewise boundary)");
  bm_mc->add_option("--step", bma.step, "time step (0: t/10^4)")->capture_default_str();
  bm_mc->callback([&] {
    action = [&] {
      PathConfig cfg{rc.mc(), bma.step};
      const MCEstimate e = bma.t0 ? mc_piecewise_noncrossing({bma.a, bma.b, *bma.t0, bma.t}, cfg)
                                  : mc_line_noncrossing({bma.a, bma.b, bma.t}, cfg);
      result = to_json(e);
      result["step"] = bma.step > 0.0 ? bma.step : bma.t / 1e4;
      result["bias"] = "upward (discrete monitoring misses crossings)";
      result["provenance"] = provenance(rc, true);
    };
  });

  auto* bm_cal = bm->add_subcommand("calibrate", "worst lemma ratios on the default calibration grid");
  double cal_threshold = 3.0;
  bm_cal->add_option("--threshold", cal_threshold, "lemma1 threshold on |b| sqrt(t)")->capture_default_str();
  bm_cal->callback([&] {
    action = [&] {
      const LemmaCalibration cal = calibrate_lemma_constants({}, cal_threshold);
      json by_threshold = json::array();
      for (const auto& [h, ratio] : cal.lemma1_ratio_by_threshold)
        by_threshold.push_back({{"threshold", h}, {"worst_ratio", ratio}});
      const auto& w1 = cal.lemma1_worst;
      const auto& w2 = cal.lemma2_worst;
      const auto& w3 = cal.lemma3_worst;
      result = {{"points", cal.points},
                {"lemma1", {{"worst_ratio", cal.lemma1_worst_ratio},
                            {"at", {{"a", w1.a}, {"b", w1.b}, {"t", w1.t}}},
                            {"ratio_by_threshold", by_threshold},
                            {"smallest_threshold", std::isnan(cal.lemma1_smallest_threshold)
                                                       ? json(nullptr)
                                                       : json(cal.lemma1_smallest_threshold)}}},
                {"lemma2", {{"worst_ratio", cal.lemma2_worst_ratio},
                            {"H", cal.lemma2_H},
                            {"at", {{"a", w2.a}, {"b", w2.b}, {"t", w2.t}}}}},
                {"lemma3", {{"worst_ratio", cal.lemma3_worst_ratio},
                            {"at", {{"a", w3.a}, {"b", w3.b}, {"t0", w3.t0}, {"t", w3.t}}}}},
                {"safety_factor", calibrated_constants::kCalibrationSafety},
                {"provenance", provenance(rc, false)}};
    };
  });

  // cov
  auto* cov = app.add_subcommand("cov", "correlation models");
  cov->require_subcommand(1);
  ModelArgs model_args;
  double cov_u = 3.0;
  std::optional<std::size_t> cov_n;
  double cov_spacing = 0.0;
  std::optional<double> cov_b;
  auto* cov_check = cov->add_subcommand("check", "check the theorem1 hypotheses on a grid");
  add_model_options(cov_check, model_args);
  cov_check->add_option("--u", cov_u, "level")->capture_default_str();
  cov_check->add_option("--n", cov_n, "lattice size (default for shao: prop2 grid)");
  cov_check->add_option("--spacing", cov_spacing, "lattice spacing (0: model default)");
  cov_check->add_option("--b", cov_b, "prop2 grid parameter (default: optimizer's b)");
  cov_check->callback([&] {
    action = [&] {
      const CorrelationModel model = model_args.make();
      result = {{"model", model.describe()}, {"u", cov_u}};
      HypothesisReport report;
      if (cov_n) {
        const double spacing = cov_spacing > 0.0 ? cov_spacing : model.default_spacing(*cov_n);
        report = check_lattice_hypotheses(model, cov_u, spacing, *cov_n);
        result["n"] = *cov_n;
        result["spacing"] = spacing;
      } else if (const auto* shao = std::get_if<ShaoKind>(&model.kind())) {
        const double b = cov_b ? *cov_b : optimize().b_chosen;
        const SamplingGrid grid = prop2_grid(shao->alpha, cov_u, b);
        report = check_lattice_hypotheses(model, cov_u, grid.spacing, grid.points);
        result["b"] = b;
        result["n"] = grid.points;
        result["spacing"] = grid.spacing;
      } else {
        throw PreconditionError("--n is required for non-Shao models");
      }
      result["hypotheses"] = to_json(report);
      result["provenance"] = provenance(rc, false);
    };
  });

  // bound
  auto* bound = app.add_subcommand("bound", "evaluate a lower bound");
  bound->require_subcommand(1);
  BoundArgs ba;
  auto* bound_eval = bound->add_subcommand("eval", "itemised theorem1, theorem2 or theorem3 bound");
  add_model_options(bound_eval, model_args);
  add_constants_option(bound_eval, rc);
  add_mc_options(bound_eval, rc);
  bound_eval->add_option("--theorem", ba.theorem, "1, 2 or 3")->check(CLI::IsMember({1, 2, 3}))->capture_default_str();
  bound_eval->add_option("--u", ba.u, "level")->capture_default_str();
  bound_eval->add_option("--n", ba.n, "number of grid points")->capture_default_str();
  bound_eval->add_option("--spacing", ba.spacing, "lattice spacing (0: model default)");
  bound_eval->add_option("--C", ba.C, "height");
  bound_eval->add_option("--K", ba.K, "slope");
  bound_eval->add_option("--N", ba.N, "break index");
  bound_eval->add_option("--delta-file", ba.delta_file, "theorem3: delta(1..n-1), one per line");
  bound_eval->add_option("--walk", ba.walk, "theorem3 walk probability: mc | bm")
      ->check(CLI::IsMember({"mc", "bm"}))
      ->capture_default_str();
  bound_eval->add_option("--hypotheses", ba.hypotheses, "strict | relaxed")
      ->check(CLI::IsMember({"strict", "relaxed"}))
      ->capture_default_str();
  bound_eval->callback([&] {
    action = [&] {
      BoundSpec spec{model_args.make(), ba.u, ba.n, ba.spacing};
      spec.constants = rc.policy();
      spec.hypotheses = ba.hypotheses == "strict" ? HypothesisPolicy::strict : HypothesisPolicy::relaxed;
      const auto t2 = theorem2_from(ba.C, ba.K, ba.N);
      result = {{"theorem", ba.theorem}, {"model", spec.model.describe()}, {"u", ba.u}, {"n", ba.n},
                {"spacing", spec.effective_spacing()}};
      bool randomized = false;
      if (ba.theorem == 1) {
        result["terms"] = to_json(theorem1_bound(spec));
      } else if (ba.theorem == 2) {
        if (!t2) throw PreconditionError("theorem2 needs --C, --K and --N");
        spec.params = *t2;
        result["params"] = {{"C", t2->C}, {"K", t2->K}, {"N", t2->N}};
        result["terms"] = to_json(theorem2_bound(spec));
      } else {
        const Eigen::VectorXd lags = resolve_lags(spec);
        std::vector<double> delta;
        if (!ba.delta_file.empty()) {
          delta = read_delta_file(ba.delta_file);
        } else if (t2) {
          delta = theorem2_delta(lags, ba.u, *t2);
          result["params"] = {{"C", t2->C}, {"K", t2->K}, {"N", t2->N}};
        } else {
          throw PreconditionError("theorem3 needs --delta-file or --C/--K/--N");
        }
        const WalkStructure walk = build_walk(lags);
        WalkProbability wp;
        if (ba.walk == "bm") {
          if (!t2) throw PreconditionError("--walk bm needs --C, --K and --N");
          wp = walk_event_probability(walk, delta, ba.u, WalkBrownianBound{t2->C, t2->K, t2->N, rc.policy()});
        } else {
          randomized = true;
          wp = walk_event_probability(walk, delta, ba.u, WalkMonteCarlo{rc.mc()});
        }
        spec.params = Theorem3Params{delta};
        result["walk"] = {{"method", ba.walk}, {"value", wp.value}, {"lower_bound", wp.lower_bound}};
        if (wp.estimate) result["walk"]["estimate"] = to_json(*wp.estimate);
        result["terms"] = to_json(theorem3_exact_bound(spec, wp.value));
      }
      result["provenance"] = provenance(rc, randomized);
    };
  });

  // gp
  auto* gp = app.add_subcommand("gp", "Gaussian process simulation");
  gp->require_subcommand(1);
  double gp_u = 3.0;
  std::size_t gp_n = 10;
  double gp_spacing = 0.0;
  auto* gp_sim = gp->add_subcommand("simulate", "estimate P(max_i Z(t_i) > u)");
  add_model_options(gp_sim, model_args);
  add_mc_options(gp_sim, rc);
  gp_sim->add_option("--u", gp_u, "level")->capture_default_str();
  gp_sim->add_option("--n", gp_n, "grid points")->capture_default_str();
  gp_sim->add_option("--spacing", gp_spacing, "grid spacing (0: model default)");
  gp_sim->callback([&] {
    action = [&] {
      const CorrelationModel model = model_args.make();
      const double spacing = gp_spacing > 0.0 ? gp_spacing : model.default_spacing(gp_n);
      std::vector<double> times(gp_n);
      for (std::size_t i = 0; i < gp_n; ++i) times[i] = static_cast<double>(i + 1) * spacing;
      result = {{"model", model.describe()}, {"u", gp_u}, {"n", gp_n}, {"spacing", spacing}};
      result["exceedance"] = to_json(sample_max_exceedance(model, times, gp_u, rc.mc()));
      result["provenance"] = provenance(rc, true);
    };
  });

  // verify
  auto* verify = app.add_subcommand("verify", "numerical checks of the proof chain");
  verify->require_subcommand(1);
  ChainArgs ca;
  auto* verify_chain_cmd = verify->add_subcommand("chain", "conditioning, comparison, walk and final inequality");
  add_model_options(verify_chain_cmd, model_args);
  add_mc_options(verify_chain_cmd, rc);
  verify_chain_cmd->add_option("--u", ca.u, "level")->capture_default_str();
  verify_chain_cmd->add_option("--n", ca.n, "grid points")->capture_default_str();
  verify_chain_cmd->add_option("--spacing", ca.spacing, "grid spacing (0: model default)");
  verify_chain_cmd->add_option("--C", ca.C, "height");
  verify_chain_cmd->add_option("--K", ca.K, "slope");
  verify_chain_cmd->add_option("--N", ca.N, "break index");
  verify_chain_cmd->add_option("--check-samples", ca.check_samples, "samples for the auxiliary checks")
      ->capture_default_str();
  verify_chain_cmd->add_flag("--no-aux", ca.no_aux, "skip conditioning / comparison / walk checks");
  verify_chain_cmd->callback([&] {
    action = [&] {
      ChainOptions opt;
      opt.model = model_args.make();
      opt.u = ca.u;
      opt.n = ca.n;
      opt.spacing = ca.spacing;
      opt.params = theorem2_from(ca.C, ca.K, ca.N);
      opt.mc = rc.mc();
      opt.check_samples = ca.check_samples;
      opt.run_auxiliary = !ca.no_aux;
      const ChainReport report = verify_chain(opt);
      json checks = json::array();
      for (const auto& c : report.checks)
        checks.push_back({{"name", c.name}, {"pass", c.pass}, {"informational", c.informational},
                          {"lhs", c.lhs}, {"rhs", c.rhs}, {"detail", c.detail}});
      result = {{"model", opt.model.describe()}, {"u", opt.u}, {"n", opt.n},
                {"params", {{"C", report.params.C}, {"K", report.params.K}, {"N", report.params.N}}},
                {"pass", report.pass()}, {"checks", checks},
                {"exceedance", to_json(report.exceedance)}, {"walk", to_json(report.walk)},
                {"theorem3", to_json(report.theorem3)}, {"theorem2", to_json(report.theorem2)},
                {"theorem1", to_json(report.theorem1)}, {"provenance", provenance(rc, true)}};
      result["provenance"]["constants_mode"] = "explicit";
      contract_failed = !report.pass();
    };
  });

  // optimize
  auto* optimize_cmd = app.add_subcommand("optimize", "parameter optimisation");
  optimize_cmd->require_subcommand(1);
  std::string report_format = "json";
  auto* opt_pickands = optimize_cmd->add_subcommand("pickands", "maximise g(kappa) and derive b, Y");
  opt_pickands->add_option("--report", report_format, "report format")->check(CLI::IsMember({"json"}))
      ->capture_default_str();
  opt_pickands->callback([&] {
    action = [&] {
      const OptimizationResult r = optimize();
      result = {{"kappa_star", r.kappa_star},
                {"f_at_kappa", r.f_at_kappa},
                {"b_chosen", r.b_chosen},
                {"Y_chosen", r.Y_chosen},
                {"g_star", r.g_star},
                {"g_star_over_e", r.g_star / std::exp(1.0)},
                {"constraints",
                 {{"b_lt_f", r.constraints.b_lt_f},
                  {"slope_constraint", r.constraints.slope_constraint},
                  {"Y_in_range", r.constraints.Y_in_range}}},
                {"brackets_agree", r.brackets_agree},
                {"used_fallback", r.used_fallback},
                {"kappa_spread", r.kappa_spread},
                {"provenance", provenance(rc, false)}};
      contract_failed = !r.constraints.all() || r.g_star / std::exp(1.0) < kPickandsBase;
    };
  });

  // curve
  auto* curve = app.add_subcommand("curve", "curve emission");
  curve->require_subcommand(1);
  CurveArgs cu;
  std::string curve_format = "csv";
  auto* curve_h = curve->add_subcommand("halpha", "lower-bound shape for H_alpha against other bounds");
  curve_h->add_option("--alpha-min", cu.alpha_min, "smallest alpha")->capture_default_str();
  curve_h->add_option("--alpha-max", cu.alpha_max, "largest alpha")->capture_default_str();
  curve_h->add_option("--points", cu.points, "grid points")->capture_default_str();
  curve_h->add_option("--c", cu.c, "unknown constant c (non-rigorous, default 1)")->capture_default_str();
  curve_h->add_option("--format", curve_format, "csv | json")->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  curve_h->callback([&] {
    action = [&] {
      if (cu.points < 1) throw PreconditionError("--points must be positive");
      if (!(cu.alpha_min <= cu.alpha_max)) throw PreconditionError("--alpha-min must not exceed --alpha-max");
      std::vector<double> alphas(cu.points);
      for (std::size_t i = 0; i < cu.points; ++i)
        alphas[i] = cu.points == 1 ? cu.alpha_min
                                   : cu.alpha_min + (cu.alpha_max - cu.alpha_min) * static_cast<double>(i) /
                                                        static_cast<double>(cu.points - 1);
      const auto points = emit_halpha_curve(alphas, cu.c);
      rc.format = curve_format;
      if (curve_format == "csv") {
        std::ostringstream csv;
        csv << "# c=" << cu.c << " (non-rigorous multiplier), constants_mode=" << rc.constants
            << ", seed=none, samples=none\n"
            << halpha_csv(points);
        result = csv.str();
      } else {
        json rows = json::array();
        for (const auto& p : points)
          rows.push_back({{"alpha", p.alpha}, {"lower_bound_shape", p.lower_bound_shape},
                          {"conjecture", p.conjecture}, {"michna", p.michna}, {"prior_harper", p.prior_harper}});
        result = {{"c", cu.c}, {"c_rigorous", false}, {"points", rows}, {"provenance", provenance(rc, false)}};
      }
    };
  });

  try {
    std::vector<std::string> args = merge_config(app, raw_args, err);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    app.exit(e, err, err);
    return kExitUsage;
  } catch (const std::exception& e) {
    err << json{{"error", "config"}, {"message", e.what()}}.dump() << "\n";
    return kExitUsage;
  }

  try {
    if (!action) return kExitUsage;
    action();
  } catch (const std::exception& e) {
    std::string kind = "error";
    if (dynamic_cast<const DomainError*>(&e)) kind = "domain_error";
    else if (dynamic_cast<const PreconditionError*>(&e)) kind = "precondition_error";
    else if (dynamic_cast<const DegenerateError*>(&e)) kind = "degenerate_error";
    else if (dynamic_cast<const ConstraintError*>(&e)) kind = "constraint_error";
    else if (dynamic_cast<const FactorizationError*>(&e)) kind = "factorization_error";
    json j{{"error", kind}, {"message", e.what()}};
    if (const auto* capped = dynamic_cast<const CappedGridError*>(&e)) {
      j["error"] = "capped_grid";
      j["log10_points"] = capped->log10_points();
    }
    err << j.dump() << "\n";
    return kExitFailure;
  }

  const std::string text = result.is_string() ? result.get<std::string>() : result.dump(2) + "\n";
  if (rc.output.empty()) {
    out << text;
  } else {
    std::ofstream file(rc.output, std::ios::binary);
    if (!file) {
      err << json{{"error", "io"}, {"message", "cannot write " + rc.output}}.dump() << "\n";
      return kExitFailure;
    }
    file << text;
  }
  return contract_failed ? kExitFailure : kExitOk;
}

}  // namespace pickands::cli
