#include "lrsim/validate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "lrsim/datagen.hpp"
#include "lrsim/errors.hpp"
#include "lrsim/io.hpp"
#include "lrsim/oracle.hpp"
#include "lrsim/prior.hpp"
#include "lrsim/risk.hpp"
#include "lrsim/sampler.hpp"
#include "lrsim/stats.hpp"

namespace lrsim {

double SuiteResult::value(const std::string& key) const {
  for (const auto& [k, v] : measured) {
    if (k == key) return v;
  }
  throw InvalidParameter("suite " + name + " has no measurement '" + key + "'");
}

namespace {

double wilson_lower(long hits, long n, double z) {
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(hits) / nn;
  const double z2 = z * z;
  const double centre = p + z2 / (2.0 * nn);
  const double spread = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
  return (centre - spread) / (1.0 + z2 / nn);
}

Matrix rotation2(double angle) {
  Matrix v(2, 2);
  v << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return v;
}

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

TruthSpec coefficient_truth(Index d, std::vector<double> beta, Rng& rng) {
  LinkSpec link;
  link.kind = LinkSpec::Kind::Coefficients;
  link.beta = std::move(beta);
  return make_truth(d, 1, link, 1.0, rng);
}

struct ChainMean {
  double estimate = 0.0;
  double std_error = 0.0;
};

// Mean over chains of per-chain means; the error combines per-chain
// batch-means errors.
template <class Extract>
ChainMean chain_mean(const MultiChainResult& fit, Extract extract) {
  ChainMean out;
  double var = 0.0;
  for (const ChainResult& c : fit.chains) {
    std::vector<double> xs;
    xs.reserve(c.draws.size());
    for (const PosteriorDraw& d : c.draws) xs.push_back(extract(d));
    out.estimate += mean(xs);
    const double se = batch_means_stderr(xs);
    var += se * se;
  }
  const double k = static_cast<double>(fit.chains.size());
  out.estimate /= k;
  out.std_error = std::sqrt(var) / k;
  return out;
}

}  // namespace

SuiteResult small_ball_suite(const SmallBallParams& p) {
  SuiteResult out;
  out.name = "small_ball";
  if (p.d < 2 || p.rank < 1 || p.rank > p.d || p.draws < 1) throw InvalidParameter("bad small-ball parameters");
  PriorConfig cfg;
  cfg.d = p.d;
  cfg.n = 1;
  const std::vector<double> alpha = cfg.dirichlet_parameters();
  Rng rng = make_rng(p.seed, 0);

  Matrix U;
  Vector lam;
  for (int attempt = 0;; ++attempt) {
    if (attempt > 100000) throw InvalidParameter("could not draw a target of the requested effective rank");
    const OrthogonalFactor v = sample_haar_orthogonal(p.d, rng);
    const Vector root = sample_dirichlet(alpha, rng).values().cwiseSqrt();
    if (effective_rank(root, p.epsilon) != p.rank) continue;
    std::vector<Index> order(p.d);
    for (Index i = 0; i < p.d; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](Index a, Index b) { return root[a] > root[b]; });
    U.resize(p.d, p.d);
    lam.resize(p.d);
    for (Index i = 0; i < p.d; ++i) {
      U.col(i) = v.matrix().col(order[i]);
      lam[i] = root[order[i]];
    }
    break;
  }

  Rng draw_rng = make_rng(p.seed, 1);
  long hits = 0;
  for (long t = 0; t < p.draws; ++t) {
    const OrthogonalFactor v = sample_haar_orthogonal(p.d, draw_rng);
    const SpectrumSimplex g = sample_dirichlet(alpha, draw_rng);
    bool inside = true;
    for (Index i = 0; i < p.d && inside; ++i) inside = std::abs(std::sqrt(g.values()[i]) - lam[i]) <= p.epsilon;
    for (int j = 0; j < p.rank && inside; ++j) inside = (v.matrix().col(j) - U.col(j)).norm() <= p.eta;
    hits += inside;
  }
  const double p_hat = static_cast<double>(hits) / static_cast<double>(p.draws);
  const double lower = wilson_lower(hits, p.draws, p.z);
  const double bound =
      std::pow(p.eta, p.rank * (p.d - 1)) / std::pow(2.0, 4.0 * p.rank * p.d);
  out.passed = lower >= bound;
  out.measured = {{"estimate", p_hat}, {"lower_confidence", lower}, {"bound", bound},
                  {"draws", static_cast<double>(p.draws)}, {"target_lambda_1", lam[0]}};
  std::ostringstream os;
  os << "ball mass " << p_hat << " (lower " << lower << ") vs bound " << bound;
  out.detail = os.str();
  return out;
}

SuiteResult pythagoras_suite(const PythagorasParams& p) {
  SuiteResult out;
  out.name = "pythagoras";
  Rng rng = make_rng(p.seed, 0);
  LinkSpec link;  // Sobolev k = 2
  const TruthSpec truth = make_truth(p.d, 1, link, 1.0, rng);
  PriorConfig prior;
  prior.d = p.d;
  prior.n = 5;
  const NoiseSpec noise{NoiseKind::Gaussian, p.sigma};
  const DesignSampler sampler = default_design_sampler(p.d);

  double worst = 0.0;
  int failures = 0;
  for (int k = 0; k < p.pairs; ++k) {
    Rng pair_rng = make_rng(p.seed, 10 + static_cast<std::uint64_t>(k));
    const IndexMatrix b = sample_matrix_prior(prior, pair_rng);
    const LinkFunction f = sample_link_prior(prior, pair_rng);
    const PythagorasResult r = pythagoras_check(b, f, truth, sampler, noise, p.n_mc, pair_rng);
    const double z = r.std_error > 0.0 ? r.discrepancy / r.std_error : (r.discrepancy == 0.0 ? 0.0 : INFINITY);
    worst = std::max(worst, z);
    if (!(r.discrepancy <= p.tolerance * r.std_error) && r.discrepancy != 0.0) ++failures;
  }
  out.passed = failures == 0;
  out.measured = {{"max_discrepancy_in_stderr", worst}, {"failures", static_cast<double>(failures)},
                  {"pairs", static_cast<double>(p.pairs)}, {"n_mc", static_cast<double>(p.n_mc)}};
  std::ostringstream os;
  os << "worst pair at " << worst << " stderr (limit " << p.tolerance << ")";
  out.detail = os.str();
  return out;
}

SuiteResult detailed_balance_suite(const DetailedBalanceParams& p) {
  SuiteResult out;
  out.name = "detailed_balance";
  Rng rng = make_rng(p.seed, 0);
  const TruthSpec truth = coefficient_truth(2, {0.1, 0.4}, rng);
  const LabeledDataset data = generate(truth, 30, NoiseSpec{NoiseKind::Gaussian, 0.3}, derive_seed(p.seed, 1));
  PriorConfig prior;
  prior.d = 2;
  prior.n = 30;
  prior.max_dimension = 2;

  const double angles[3] = {0.0, std::numbers::pi / 3, 2 * std::numbers::pi / 3};
  const double b2[3] = {-0.5, 0.25, 0.75};
  constexpr int kStates = 9;
  std::vector<double> risks(kStates);
  {
    GibbsTarget probe(data, lambda_schedule(1.0, 1.0, 0.3, 30).with_lambda(0.0), prior);
    for (int s = 0; s < kStates; ++s) {
      risks[s] = probe.make_state(OrthogonalFactor(rotation2(angles[s / 3])), SpectrumSimplex(vec({1.0, 0.0})),
                                  vec({0.0, b2[s % 3]}))
                     .risk;
    }
  }
  const auto [lo, hi] = std::minmax_element(risks.begin(), risks.end());
  const double lambda = *hi > *lo ? std::log(p.target_spread) / (*hi - *lo) : 1.0;
  GibbsTarget target(data, lambda_schedule(1.0, 1.0, 0.3, 30).with_lambda(lambda), prior);
  std::vector<double> log_target(kStates);
  for (int s = 0; s < kStates; ++s) {
    log_target[s] = target
                        .make_state(OrthogonalFactor(rotation2(angles[s / 3])), SpectrumSimplex(vec({1.0, 0.0})),
                                    vec({0.0, b2[s % 3]}))
                        .log_target;
  }
  const double top = *std::max_element(log_target.begin(), log_target.end());
  std::vector<double> pi(kStates);
  double z = 0.0;
  for (int s = 0; s < kStates; ++s) z += pi[s] = std::exp(log_target[s] - top);
  for (double& v : pi) v /= z;

  MhOptions options;
  options.inject_sign_bug = p.inject_bug;
  std::vector<long> counts(kStates * kStates, 0);
  std::vector<long> visits(kStates, 0);
  Rng chain = make_rng(p.seed, 2);
  std::uniform_int_distribution<int> other(0, kStates - 2);
  int s = 0;
  for (long t = 0; t < p.steps; ++t) {
    int j = other(chain);
    if (j >= s) ++j;
    ++visits[s];
    if (metropolis_accept(log_target[s], log_target[j], 0.0, options, chain)) {
      ++counts[s * kStates + j];
      s = j;
    }
  }

  double worst = 0.0, worst_abs = 0.0, tv = 0.0;
  for (int i = 0; i < kStates; ++i) {
    tv += 0.5 * std::abs(static_cast<double>(visits[i]) / static_cast<double>(p.steps) - pi[i]);
    for (int j = i + 1; j < kStates; ++j) {
      const double nij = static_cast<double>(counts[i * kStates + j]);
      const double nji = static_cast<double>(counts[j * kStates + i]);
      // Symmetry of raw counts only shows reversibility w.r.t. some law;
      // weighting the empirical kernel by the exact target pins it to pi.
      if (nij + nji > 0.0) worst = std::max(worst, std::abs(nij - nji) / (nij + nji));
      else worst = 1.0;
      const double pij = visits[i] ? nij / static_cast<double>(visits[i]) : 0.0;
      const double pji = visits[j] ? nji / static_cast<double>(visits[j]) : 0.0;
      worst_abs = std::max(worst_abs, std::abs(pi[i] * pij - pi[j] * pji));
    }
  }
  out.passed = worst_abs < p.tolerance;
  out.measured = {{"max_flow_asymmetry", worst_abs},
                  {"max_empirical_flow_asymmetry", worst},
                  {"stationary_tv", tv},
                  {"lambda", lambda},
                  {"steps", static_cast<double>(p.steps)},
                  {"inject_bug", p.inject_bug ? 1.0 : 0.0}};
  std::ostringstream os;
  os << "max flow asymmetry " << worst_abs << " (limit " << p.tolerance << ")"
     << (p.inject_bug ? " with injected sign bug" : "");
  out.detail = os.str();
  return out;
}

SuiteResult oracle_suite(const OracleParams& p) {
  SuiteResult out;
  out.name = "oracle";

  // d = 1, M = 1: posterior mean of beta_1.
  Rng rng = make_rng(p.seed, 0);
  const TruthSpec t1 = coefficient_truth(1, {0.3, 0.2}, rng);
  const LabeledDataset d1 = generate(t1, 50, NoiseSpec{NoiseKind::Gaussian, 0.5}, derive_seed(p.seed, 1));
  const ModelConstants k1 = lambda_schedule(1.0, 0.5, 0.5, 50).with_lambda(50.0);
  PriorConfig p1;
  p1.d = 1;
  p1.n = 50;
  p1.max_dimension = 1;
  GridSpec coarse1{p1, 1, 1, 200, 1, 4};
  GridSpec fine1{p1, 1, 1, 400, 1, 8};
  const double o1 = exact_posterior_oracle(d1, k1, fine1).mean_beta1();
  const double o1_err = std::abs(o1 - exact_posterior_oracle(d1, k1, coarse1).mean_beta1());
  ChainSettings s1;
  s1.iterations = p.iterations;
  s1.thin = 5;
  s1.schedule.dimension_every = 0;
  GibbsTarget g1(d1, k1, p1);
  const MultiChainResult fit1 = run_chains(g1, s1, p.chains, derive_seed(p.seed, 2));
  const ChainMean c1 = chain_mean(fit1, [](const PosteriorDraw& d) { return d.beta[0]; });
  const double se1 = std::hypot(c1.std_error, o1_err);
  const double z1 = std::abs(c1.estimate - o1) / se1;

  // d = 2, M <= 2: posterior mean of r_n.
  const TruthSpec t2 = coefficient_truth(2, {0.2, 0.3}, rng);
  const LabeledDataset d2 = generate(t2, 50, NoiseSpec{NoiseKind::Gaussian, 0.5}, derive_seed(p.seed, 3));
  const ModelConstants k2 = lambda_schedule(1.0, 0.5, 0.5, 50).with_lambda(10.0);
  PriorConfig p2;
  p2.d = 2;
  p2.alpha = {0.5, 0.5};
  p2.n = 50;
  p2.max_dimension = 2;
  GridSpec coarse2{p2, 24, 24, 40, 20, 3};
  GridSpec fine2{p2, 48, 48, 64, 32, 4};
  const GridPosterior fine_post = exact_posterior_oracle(d2, k2, fine2);
  const double o2 = fine_post.mean_risk();
  const double o2_err = std::abs(o2 - exact_posterior_oracle(d2, k2, coarse2).mean_risk());
  ChainSettings s2;
  s2.iterations = p.iterations;
  s2.thin = 5;
  GibbsTarget g2(d2, k2, p2);
  const MultiChainResult fit2 = run_chains(g2, s2, p.chains, derive_seed(p.seed, 4));
  const ChainMean c2 = chain_mean(fit2, [](const PosteriorDraw& d) { return d.risk; });
  const ChainMean m2 = chain_mean(fit2, [](const PosteriorDraw& d) { return d.M() == 2 ? 1.0 : 0.0; });
  const double se2 = std::hypot(c2.std_error, o2_err);
  const double z2 = std::abs(c2.estimate - o2) / se2;

  out.passed = z1 <= p.tolerance && z2 <= p.tolerance;
  out.measured = {{"d1_oracle_beta1", o1},       {"d1_chain_beta1", c1.estimate},
                  {"d1_combined_stderr", se1},   {"d1_z", z1},
                  {"d2_oracle_risk", o2},        {"d2_chain_risk", c2.estimate},
                  {"d2_combined_stderr", se2},   {"d2_z", z2},
                  {"d2_oracle_p_M2", fine_post.probability_of_dimension(2)},
                  {"d2_chain_p_M2", m2.estimate}, {"d2_psrf", fit2.psrf}};
  std::ostringstream os;
  os << "beta_1 gap " << z1 << " se, r_n gap " << z2 << " se (limit " << p.tolerance << ")";
  out.detail = os.str();
  return out;
}

SuiteResult prior_recovery_suite(const PriorRecoveryParams& p) {
  SuiteResult out;
  out.name = "prior_recovery";
  Rng rng = make_rng(p.seed, 0);
  LinkSpec link;
  const TruthSpec truth = make_truth(p.d, 1, link, 1.0, rng);
  const LabeledDataset data =
      generate(truth, p.prior_n, NoiseSpec{NoiseKind::Gaussian, 0.5}, derive_seed(p.seed, 1));
  PriorConfig prior;
  prior.d = p.d;
  prior.n = p.prior_n;
  const ModelConstants k = lambda_schedule(1.0, 0.5, 0.5, p.prior_n).with_lambda(0.0);
  GibbsTarget target(data, k, prior);

  ChainSettings s;
  const long per_chain = (p.draws + p.chains - 1) / p.chains;
  s.burn_in = 5000;
  s.thin = p.thin;
  s.iterations = s.burn_in + per_chain * p.thin;
  const MultiChainResult fit = run_chains(target, s, p.chains, derive_seed(p.seed, 2));
  const std::vector<PosteriorDraw> draws = fit.pooled_draws();

  const int cap = prior.dimension_cap();
  std::vector<long> chain_m(cap, 0), direct_m(cap, 0);
  std::vector<double> chain_g, direct_g, chain_b, direct_b;
  for (const PosteriorDraw& d : draws) {
    ++chain_m[d.M() - 1];
    chain_g.push_back(d.gamma.maxCoeff());
    chain_b.push_back(d.beta.norm());
  }
  Rng direct = make_rng(p.seed, 3);
  const std::vector<double> alpha = prior.dirichlet_parameters();
  for (std::size_t i = 0; i < draws.size(); ++i) {
    const SpectrumSimplex g = sample_dirichlet(alpha, direct);
    const LinkFunction f = sample_link_prior(prior, direct);
    ++direct_m[f.dimension() - 1];
    direct_g.push_back(g.values().maxCoeff());
    direct_b.push_back(f.coefficients().norm());
  }
  const TestResult tm = chi_square_homogeneity(chain_m, direct_m);
  const TestResult tg = ks_two_sample(chain_g, direct_g);
  const TestResult tb = ks_two_sample(chain_b, direct_b);
  out.passed = tm.p_value >= p.level && tg.p_value >= p.level && tb.p_value >= p.level;
  out.measured = {{"draws", static_cast<double>(draws.size())},
                  {"M_chi2_p", tm.p_value},
                  {"max_gamma_ks_p", tg.p_value},
                  {"beta_norm_ks_p", tb.p_value},
                  {"max_gamma_ks_D", tg.statistic},
                  {"beta_norm_ks_D", tb.statistic}};
  std::ostringstream os;
  os << "p-values M " << tm.p_value << ", max gamma " << tg.p_value << ", ||beta|| " << tb.p_value;
  out.detail = os.str();
  return out;
}

std::string suites_to_json(const std::vector<SuiteResult>& suites) {
  nlohmann::ordered_json root;
  bool all = true;
  root["suites"] = nlohmann::ordered_json::array();
  for (const SuiteResult& s : suites) {
    nlohmann::ordered_json j;
    j["name"] = s.name;
    j["passed"] = s.passed;
    j["detail"] = s.detail;
    nlohmann::ordered_json m = nlohmann::ordered_json::object();
    for (const auto& [k, v] : s.measured) m[k] = v;
    j["measured"] = m;
    root["suites"].push_back(j);
    all = all && s.passed;
  }
  root["all_passed"] = all;
  return root.dump(2) + "\n";
}

std::string format_suite_line(const SuiteResult& s) {
  return std::string(s.passed ? "PASS " : "FAIL ") + s.name + ": " + s.detail;
}

}  // namespace lrsim
