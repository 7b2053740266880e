#include "lrsim/experiment_config.hpp"

#include <set>

#include "lrsim/errors.hpp"

namespace lrsim {

namespace {

const std::set<std::string> kKnownKeys{
    "truth.d",          "truth.rank",         "truth.link",           "truth.sobolev_k",
    "truth.sobolev_terms", "truth.value",     "truth.beta",           "truth.C",
    "noise.kind",       "noise.sigma",        "model.L",              "model.sigma",
    "model.lambda",     "model.lambda_multiplier", "data.n",          "data.file",
    "prior.alpha",      "prior.decay_base",   "prior.max_dimension",  "chain.iterations",
    "chain.burn_in",    "chain.thin",         "chain.chains",         "chain.dimension_every",
    "chain.tune",       "chain.step_rotation", "chain.step_spectrum", "chain.step_coefficient",
    "run.seed",         "run.workers",        "risk.n_mc",            "risk.scored_draws",
    "rate.n_grid",      "rate.replicates",    "contract.epsilon",     "validate.inject_bug",
    "validate.small_ball_draws", "validate.toy_steps", "validate.pythagoras_pairs",
    "validate.pythagoras_mc", "validate.oracle_iterations", "validate.recovery_draws", "output.dir"};

LinkSpec::Kind parse_link_kind(const std::string& s) {
  if (s == "sobolev") return LinkSpec::Kind::Sobolev;
  if (s == "constant") return LinkSpec::Kind::Constant;
  if (s == "tanh") return LinkSpec::Kind::Tanh;
  if (s == "coefficients") return LinkSpec::Kind::Coefficients;
  throw ConfigError("unknown truth.link '" + s + "'");
}

int to_int(long v, const char* key) {
  if (v < 0 || v > 2'000'000'000L) throw ConfigError(std::string("config key '") + key + "' out of range");
  return static_cast<int>(v);
}

}  // namespace

ExperimentConfig ExperimentConfig::from(const Config& cfg, const std::string& subcommand) {
  cfg.check_known(kKnownKeys);
  ExperimentConfig e;
  e.subcommand = subcommand;
  try {
    e.d = cfg.get_long("truth.d", 3);
    e.rank = to_int(cfg.get_long("truth.rank", 1), "truth.rank");
    e.link.kind = parse_link_kind(cfg.get_string("truth.link", "sobolev"));
    e.link.sobolev_k = cfg.get_double("truth.sobolev_k", 2.0);
    e.link.sobolev_terms = to_int(cfg.get_long("truth.sobolev_terms", 16), "truth.sobolev_terms");
    e.link.value = cfg.get_double("truth.value", 0.0);
    e.link.beta = cfg.get_doubles("truth.beta");
    e.C = cfg.get_double("truth.C", 1.0);

    e.noise.kind = parse_noise_kind(cfg.get_string("noise.kind", "gaussian"));
    e.noise.sigma = cfg.get_double("noise.sigma", 0.5);
    // Moment constants default to the ones implied by the noise law; L must
    // stay positive for the schedule even with noiseless data.
    e.sigma = cfg.get_double("model.sigma", e.noise.sigma);
    e.L = cfg.get_double("model.L", e.noise.L() > 0.0 ? e.noise.L() : 1.0);
    if (cfg.contains("model.lambda")) e.lambda = cfg.get_double("model.lambda", 0.0);
    e.lambda_multiplier = cfg.get_double("model.lambda_multiplier", 1.0);

    e.n = to_int(cfg.get_long("data.n", 500), "data.n");
    if (cfg.contains("data.file")) e.data_file = cfg.get_string("data.file", "");

    e.alpha = cfg.get_doubles("prior.alpha");
    e.decay_base = cfg.get_double("prior.decay_base", 10.0);
    e.max_dimension = to_int(cfg.get_long("prior.max_dimension", 0), "prior.max_dimension");

    e.chain.iterations = cfg.get_long("chain.iterations", 20000);
    e.chain.burn_in = cfg.get_long("chain.burn_in", -1);
    e.chain.thin = cfg.get_long("chain.thin", 10);
    e.chain.schedule.dimension_every = to_int(cfg.get_long("chain.dimension_every", 5), "chain.dimension_every");
    e.chain.schedule.tune_during_burn_in = cfg.get_bool("chain.tune", true);
    e.chain.schedule.initial_steps.rotation = cfg.get_double("chain.step_rotation", 0.3);
    e.chain.schedule.initial_steps.spectrum = cfg.get_double("chain.step_spectrum", 0.02);
    e.chain.schedule.initial_steps.coefficient = cfg.get_double("chain.step_coefficient", 0.2);
    e.chains = to_int(cfg.get_long("chain.chains", 4), "chain.chains");

    e.seed = cfg.require_u64("run.seed");
    e.workers = to_int(cfg.get_long("run.workers", 1), "run.workers");

    e.n_mc = to_int(cfg.get_long("risk.n_mc", 2000), "risk.n_mc");
    e.scored_draws = to_int(cfg.get_long("risk.scored_draws", 1000), "risk.scored_draws");

    for (long v : cfg.get_longs("rate.n_grid")) e.n_grid.push_back(to_int(v, "rate.n_grid"));
    e.replicates = to_int(cfg.get_long("rate.replicates", 8), "rate.replicates");
    e.epsilon = cfg.get_doubles("contract.epsilon");

    e.validate.inject_bug = cfg.get_bool("validate.inject_bug", false);
    e.validate.small_ball_draws = cfg.get_long("validate.small_ball_draws", e.validate.small_ball_draws);
    e.validate.toy_steps = cfg.get_long("validate.toy_steps", e.validate.toy_steps);
    e.validate.pythagoras_pairs =
        to_int(cfg.get_long("validate.pythagoras_pairs", e.validate.pythagoras_pairs), "validate.pythagoras_pairs");
    e.validate.pythagoras_mc =
        to_int(cfg.get_long("validate.pythagoras_mc", e.validate.pythagoras_mc), "validate.pythagoras_mc");
    e.validate.oracle_iterations = cfg.get_long("validate.oracle_iterations", e.validate.oracle_iterations);
    e.validate.recovery_draws = cfg.get_long("validate.recovery_draws", e.validate.recovery_draws);

    e.output_dir = cfg.get_string("output.dir", "out");
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& ex) {
    throw ConfigError(std::string("invalid configuration: ") + ex.what());
  }

  if (e.d < 1) throw ConfigError("truth.d must be at least 1");
  if (e.rank < 1 || e.rank > e.d) throw ConfigError("truth.rank must lie in [1, truth.d]");
  if (!(e.C >= 1.0)) throw ConfigError("truth.C must be at least 1");
  if (e.n < 1) throw ConfigError("data.n must be at least 1");
  if (e.chains < 1) throw ConfigError("chain.chains must be at least 1");
  if (e.workers < 1) throw ConfigError("run.workers must be at least 1");
  if (e.n_mc < 1) throw ConfigError("risk.n_mc must be at least 1");
  if (e.replicates < 1) throw ConfigError("rate.replicates must be at least 1");
  if (!(e.lambda_multiplier >= 0.0)) throw ConfigError("model.lambda_multiplier must be nonnegative");
  for (double eps : e.epsilon) {
    if (!(eps > 0.0 && eps <= 1.0)) throw ConfigError("contract.epsilon entries must lie in (0, 1]");
  }
  for (std::size_t i = 1; i < e.n_grid.size(); ++i) {
    if (e.n_grid[i] <= e.n_grid[i - 1]) throw ConfigError("rate.n_grid must be strictly increasing");
  }
  try {
    e.chain.validate();
    e.prior_for(e.n).validate();
  } catch (const std::exception& ex) {
    throw ConfigError(std::string("invalid configuration: ") + ex.what());
  }
  return e;
}

ModelConstants ExperimentConfig::constants_for(int sample_size) const {
  ModelConstants k = lambda_schedule(C, L, sigma, sample_size);
  if (lambda) return k.with_lambda(*lambda);
  return k.with_lambda(k.lambda * lambda_multiplier);
}

PriorConfig ExperimentConfig::prior_for(int sample_size) const {
  PriorConfig p;
  p.d = d;
  p.alpha = alpha;
  p.n = sample_size;
  p.C = C;
  p.decay_base = decay_base;
  p.max_dimension = max_dimension;
  return p;
}

TruthSpec ExperimentConfig::make_truth_spec() const {
  Rng rng = make_rng(seed, 0);
  try {
    return make_truth(d, rank, link, C, rng);
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(std::string("infeasible truth: ") + ex.what());
  }
}

}  // namespace lrsim
