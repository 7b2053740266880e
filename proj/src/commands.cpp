#include "lrsim/commands.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <sstream>

#include "lrsim/errors.hpp"
#include "lrsim/io.hpp"
#include "lrsim/svg.hpp"

namespace lrsim {

std::filesystem::path resolve_output_dir(const ExperimentConfig& cfg,
                                         const std::optional<std::filesystem::path>& cli_out) {
  if (const char* env = std::getenv(kOutputEnv); env != nullptr && *env != '\0') return env;
  if (cli_out) return *cli_out;
  return cfg.output_dir;
}

LabeledDataset synthetic_dataset(const ExperimentConfig& cfg) {
  const TruthSpec truth = cfg.make_truth_spec();
  return generate(truth, cfg.n, cfg.noise, derive_seed(cfg.seed, 1));
}

FitOutcome cmd_fit(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log) {
  LabeledDataset data = cfg.data_file ? read_dataset(*cfg.data_file) : synthetic_dataset(cfg);
  const int n = data.n();
  ExperimentConfig local = cfg;
  local.d = data.d;
  const ModelConstants k = local.constants_for(n);
  const PriorConfig prior = local.prior_for(n);
  GibbsTarget target(data, k, prior);
  const MultiChainResult fit = run_chains(target, cfg.chain, cfg.chains, derive_seed(cfg.seed, 2), cfg.workers);
  const std::vector<PosteriorDraw> draws = fit.pooled_draws();
  if (draws.empty()) throw ConfigError("chain settings keep no draws; increase chain.iterations");

  Rng pick = make_rng(cfg.seed, 3);
  const PosteriorDraw& est = draw_estimator(draws, pick);

  FitOutcome outcome;
  outcome.psrf = fit.psrf;
  outcome.stats = fit.stats;
  outcome.draws = draws.size();
  for (const ChainResult& c : fit.chains) outcome.max_cache_drift = std::max(outcome.max_cache_drift, c.max_cache_drift);

  RiskReport& rep = outcome.report;
  rep.n = n;
  rep.d = data.d;
  rep.M = est.M();
  rep.lambda = k.lambda;
  rep.empirical_risk = est.risk;
  rep.n_mc = cfg.n_mc;
  rep.seed = cfg.seed;
  rep.excess_risk_estimate = std::numeric_limits<double>::quiet_NaN();
  rep.excess_risk_mc_stderr = std::numeric_limits<double>::quiet_NaN();
  outcome.posterior_mean_excess = std::numeric_limits<double>::quiet_NaN();
  if (data.truth) {
    const DesignSampler sampler = default_design_sampler(data.d);
    Rng mc = make_rng(cfg.seed, 4);
    const McEstimate e = excess_risk_mc(IndexMatrix::from_dense(est.B), LinkFunction(est.beta, prior.budget()),
                                        *data.truth, sampler, cfg.n_mc, mc);
    rep.excess_risk_estimate = e.estimate;
    rep.excess_risk_mc_stderr = e.std_error;

    Rng eval_rng = make_rng(cfg.seed, 5);
    const EvaluationSet eval(*data.truth, sampler, cfg.n_mc, eval_rng);
    std::size_t keep = draws.size();
    if (cfg.scored_draws > 0) keep = std::min<std::size_t>(keep, cfg.scored_draws);
    double sum = 0.0;
    for (std::size_t i = 0; i < keep; ++i) {
      const PosteriorDraw& d = draws[i * draws.size() / keep];
      sum += eval.excess_risk(d.B, d.beta).estimate;
    }
    outcome.posterior_mean_excess = sum / static_cast<double>(keep);
  }

  write_draws(out / "draws.csv", draws, data.d);
  write_text(out / "risk_report.csv", RiskReport::csv_header() + "\n" + rep.csv_row() + "\n");

  std::ostringstream s;
  s << "lrsim fit\n";
  s << "data: n=" << n << " d=" << data.d << " noise=" << to_string(data.noise.kind)
    << " sigma=" << data.noise.sigma << "\n";
  if (!data.truth_description.empty()) s << "truth: " << data.truth_description << "\n";
  s << "temperature: lambda=" << k.lambda << " (w=" << k.w << ", C1=" << k.c1 << ")\n";
  s << "chains: " << cfg.chains << " x " << cfg.chain.iterations << " iterations, burn-in "
    << cfg.chain.effective_burn_in() << ", thin " << cfg.chain.thin << ", draws kept " << draws.size() << "\n";
  for (int m = 0; m < kMoveKinds; ++m) {
    const auto kind = static_cast<MoveKind>(m);
    s << "acceptance " << to_string(kind) << ": " << fit.stats.acceptance_rate(kind) << "\n";
  }
  s << "psrf(r_n): " << fit.psrf << (fit.psrf > 1.1 ? "  WARNING: chains may not have mixed" : "") << "\n";
  s << "max cache drift: " << outcome.max_cache_drift << "\n";
  s << "estimator: M=" << est.M() << " r_n=" << est.risk << "\n";
  if (data.truth) {
    s << "excess risk of estimator: " << rep.excess_risk_estimate << " +- " << rep.excess_risk_mc_stderr << "\n";
    s << "posterior-mean excess risk: " << outcome.posterior_mean_excess << "\n";
  } else {
    s << "excess risk: unavailable (dataset carries no truth)\n";
  }
  write_text(out / "summary.txt", s.str());
  log << s.str();
  return outcome;
}

LabeledDataset cmd_gen_data(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log) {
  LabeledDataset data = synthetic_dataset(cfg);
  write_dataset(out / "dataset.csv", data);
  log << "wrote " << (out / "dataset.csv").string() << " (n=" << data.n() << ", d=" << data.d << ")\n";
  return data;
}

RateCurve cmd_rate(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log) {
  if (cfg.n_grid.size() < 4) throw ConfigError("rate.n_grid needs at least 4 sample sizes");
  const StudyResult study = run_study(cfg);
  const RateCurve curve = summarize_rate(study);
  write_text(out / "rate.csv", rate_csv(curve));

  SvgSeries pm{"posterior-mean excess", "#1f77b4", {}, {}, {}};
  SvgSeries single{"single-draw excess", "#d62728", {}, {}, {}};
  for (const RatePoint& p : curve.points) {
    pm.x.push_back(p.n);
    pm.y.push_back(p.mean_excess);
    pm.err.push_back(p.stderr_excess);
    single.x.push_back(p.n);
    single.y.push_back(p.single_mean);
    single.err.push_back(p.single_stderr);
  }
  write_text(out / "rate.svg", loglog_svg("Excess risk vs n", {pm, single}, curve.fit.slope, curve.fit.intercept,
                                          "n", "excess risk"));
  std::ostringstream s;
  s << "lrsim rate\n" << "truth: " << study.truth.describe() << "\n";
  s << "slope: " << curve.fit.slope << " (95% CI " << curve.fit.ci_low << ", " << curve.fit.ci_high << ")\n";
  s << "decreasing within 2 stderr: " << (curve.decreasing ? "yes" : "no") << "\n";
  for (const RatePoint& p : curve.points) {
    s << "n=" << p.n << " lambda=" << p.lambda << " excess=" << p.mean_excess << " +- " << p.stderr_excess
      << " single=" << p.single_mean << " +- " << p.single_stderr << "\n";
  }
  write_text(out / "rate_summary.txt", s.str());
  log << s.str();
  return curve;
}

ContractionTable cmd_contract(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log) {
  const StudyResult study = run_study(cfg);
  const ContractionTable table = summarize_contraction(study, cfg);
  write_text(out / "contraction.csv", contraction_csv(table));
  std::ostringstream s;
  s << "lrsim contract\n" << "threshold scale: " << table.scale << "\n";
  s << "90% quantiles shrink beyond 3 stderr: " << (table.quantiles_shrink ? "yes" : "no") << "\n";
  for (const ContractionRow& r : table.rows) {
    s << "n=" << r.n << " eps=" << r.epsilon << " tau=" << r.threshold << " mass=" << r.mass_below
      << " bound=" << r.bound << " q90=" << r.q90 << " +- " << r.q90_stderr << "\n";
  }
  write_text(out / "contraction_summary.txt", s.str());
  log << s.str();
  return table;
}

std::vector<SuiteResult> cmd_validate(const ExperimentConfig& cfg, const std::filesystem::path& out,
                                      std::ostream& log) {
  const ValidateSettings& v = cfg.validate;
  std::vector<SuiteResult> suites;

  SmallBallParams sb;
  sb.draws = v.small_ball_draws;
  sb.seed = derive_seed(cfg.seed, 11);
  suites.push_back(small_ball_suite(sb));

  OracleParams op;
  op.iterations = v.oracle_iterations;
  op.seed = derive_seed(cfg.seed, 12);
  suites.push_back(oracle_suite(op));

  PythagorasParams pp;
  pp.pairs = v.pythagoras_pairs;
  pp.n_mc = v.pythagoras_mc;
  pp.seed = derive_seed(cfg.seed, 13);
  suites.push_back(pythagoras_suite(pp));

  DetailedBalanceParams dp;
  dp.steps = v.toy_steps;
  dp.inject_bug = v.inject_bug;
  dp.seed = derive_seed(cfg.seed, 14);
  suites.push_back(detailed_balance_suite(dp));

  PriorRecoveryParams rp;
  rp.draws = v.recovery_draws;
  rp.seed = derive_seed(cfg.seed, 15);
  suites.push_back(prior_recovery_suite(rp));

  write_text(out / "validate.json", suites_to_json(suites));
  for (const SuiteResult& s : suites) log << format_suite_line(s) << "\n";
  return suites;
}

int run_command(const std::string& subcommand, const std::filesystem::path& config_path,
                const std::optional<std::filesystem::path>& cli_out, std::ostream& log, std::ostream& err) {
  try {
    const ExperimentConfig cfg = ExperimentConfig::from(Config::load(config_path), subcommand);
    const std::filesystem::path out = resolve_output_dir(cfg, cli_out);
    if (subcommand == "fit") {
      cmd_fit(cfg, out, log);
    } else if (subcommand == "gen-data") {
      cmd_gen_data(cfg, out, log);
    } else if (subcommand == "rate") {
      cmd_rate(cfg, out, log);
    } else if (subcommand == "contract") {
      cmd_contract(cfg, out, log);
    } else if (subcommand == "validate") {
      bool ok = true;
      for (const SuiteResult& s : cmd_validate(cfg, out, log)) ok = ok && s.passed;
      return ok ? 0 : 1;
    } else {
      err << "unknown subcommand '" << subcommand << "'\n";
      return 2;
    }
    return 0;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return 2;
  }
}

}  // namespace lrsim
