#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lrsim/datagen.hpp"
#include "lrsim/errors.hpp"
#include "lrsim/sampler.hpp"
#include "lrsim/stats.hpp"

using namespace lrsim;

namespace {
Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

struct Fixture {
  TruthSpec truth;
  LabeledDataset data;
  PriorConfig prior;
  ModelConstants constants;

  static TruthSpec truth_for(Index d, std::uint64_t seed, std::vector<double> beta) {
    Rng rng(seed);
    LinkSpec link;
    link.kind = LinkSpec::Kind::Coefficients;
    link.beta = std::move(beta);
    return make_truth(d, 1, link, 1.0, rng);
  }

  Fixture(Index d, int n, double lambda_scale = 1.0, std::uint64_t seed = 1,
          std::vector<double> beta = {0.2, 0.3})
      : truth(truth_for(d, seed, std::move(beta))) {
    data = generate(truth, n, NoiseSpec{NoiseKind::Gaussian, 0.3}, seed + 100);
    prior.d = d;
    prior.n = n;
    constants = lambda_schedule(1.0, 1.0, 0.3, n);
    constants = constants.with_lambda(constants.lambda * lambda_scale);
  }
};
}  // namespace

TEST_CASE("target is invariant under eigenpair relabeling and column sign flips") {
  Fixture fx(3, 50);
  GibbsTarget target(fx.data, fx.constants, fx.prior);
  Rng rng(2);
  const ChainState s = target.sample_prior_state(rng);
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(3);
  perm.indices() << 2, 0, 1;
  const Matrix v2 = s.V.matrix() * perm;
  const Vector g2 = perm.transpose() * s.gamma.values();
  const ChainState p = target.make_state(OrthogonalFactor(v2), SpectrumSimplex(g2), s.beta);
  Matrix v3 = s.V.matrix();
  v3.col(1) *= -1.0;
  const ChainState f = target.make_state(OrthogonalFactor(v3), s.gamma, s.beta);
  CHECK(std::abs(p.log_target - s.log_target) < 1e-9);
  CHECK(std::abs(f.log_target - s.log_target) < 1e-9);
  CHECK(std::abs(log_gibbs_target(s, target) - s.log_target) < 1e-12);
}

TEST_CASE("constant link fitting a single point has zero risk") {
  LabeledDataset d;
  d.d = 1;
  d.x = Matrix::Constant(1, 1, 0.4);
  d.y = vec({0.7});
  PriorConfig prior;
  prior.d = 1;
  prior.n = 1;
  GibbsTarget target(d, lambda_schedule(1, 1, 1, 1), prior);
  const ChainState s = target.make_state(OrthogonalFactor::identity(1), SpectrumSimplex(vec({1.0})), vec({0.7}));
  CHECK(s.risk == 0.0);
  CHECK(s.log_target == doctest::Approx(s.prior.total()));
}

TEST_CASE("zero rotation step is the identity move") {
  Fixture fx(3, 30);
  GibbsTarget target(fx.data, fx.constants, fx.prior);
  Rng rng(3);
  const ChainState s = target.sample_prior_state(rng);
  StepSizes steps;
  steps.rotation = 0.0;
  const Proposal p = propose_move(s, MoveKind::Rotation, steps, target, rng);
  CHECK_FALSE(p.rejected);
  CHECK(p.log_proposal_ratio == 0.0);
  CHECK((p.candidate.V.matrix() - s.V.matrix()).norm() == 0.0);
}

TEST_CASE("coefficient moves leaving the ball are rejected") {
  Fixture fx(2, 30);
  fx.prior.max_dimension = 2;
  GibbsTarget target(fx.data, fx.constants, fx.prior);
  const ChainState s =
      target.make_state(OrthogonalFactor::identity(2), SpectrumSimplex(vec({0.5, 0.5})), vec({1.0, 0.5}));
  Rng rng(4);
  StepSizes steps;
  steps.coefficient = 0.5;
  int rejected = 0;
  for (int k = 0; k < 1000; ++k) {
    const Proposal p = propose_move(s, MoveKind::Coefficient, steps, target, rng);
    if (p.rejected) {
      ++rejected;
    } else {
      REQUIRE(weighted_l1_norm(p.candidate.beta) <= 2.0 + 1e-12);
      REQUIRE(p.log_proposal_ratio == 0.0);
    }
  }
  CHECK(rejected > 0);
}

TEST_CASE("birth followed by the matching death is an exact round trip") {
  Fixture fx(3, 40);
  GibbsTarget target(fx.data, fx.constants, fx.prior);
  Rng rng(5);
  for (int k = 0; k < 200; ++k) {
    const ChainState s = target.sample_prior_state(rng);
    const double half = (2.0 - weighted_l1_norm(s.beta)) / (s.M() + 1);
    const double b = (2.0 * uniform01(rng) - 1.0) * half;
    const Proposal up = propose_birth(s, b, target);
    REQUIRE_FALSE(up.rejected);
    const Proposal down = propose_death(up.candidate, target);
    REQUIRE_FALSE(down.rejected);
    REQUIRE(down.candidate.beta == s.beta);
    REQUIRE(up.log_proposal_ratio + down.log_proposal_ratio == 0.0);
    const double total = log_acceptance_ratio(s, up) + log_acceptance_ratio(up.candidate, down);
    REQUIRE(std::abs(total) < 1e-12);
  }
}

TEST_CASE("out-of-support candidates are never accepted") {
  Rng rng(6);
  MhOptions plain, bug;
  bug.inject_sign_bug = true;
  for (int k = 0; k < 1000; ++k) {
    REQUIRE_FALSE(metropolis_accept(0.0, kOutOfSupport, 0.0, plain, rng));
    REQUIRE_FALSE(metropolis_accept(-5.0, kOutOfSupport, 10.0, bug, rng));
  }
  CHECK(metropolis_accept(0.0, 1.0, 0.0, plain, rng));
}

TEST_CASE("chain draw counts and determinism") {
  Fixture fx(2, 40);
  GibbsTarget target(fx.data, fx.constants, fx.prior);
  ChainSettings s;
  s.iterations = 101;
  s.burn_in = 100;
  s.thin = 1;
  CHECK(run_chain(target, s, 1).draws.size() == 1);
  s.iterations = 2000;
  s.burn_in = 300;
  s.thin = 7;
  const ChainResult a = run_chain(target, s, 9);
  CHECK(a.draws.size() == std::size_t((2000 - 300) / 7));
  const ChainResult b = run_chain(target, s, 9);
  REQUIRE(a.draws.size() == b.draws.size());
  for (std::size_t i = 0; i < a.draws.size(); ++i) {
    REQUIRE(a.draws[i].beta == b.draws[i].beta);
    REQUIRE(a.draws[i].B == b.draws[i].B);
    REQUIRE(a.draws[i].risk == b.draws[i].risk);
  }
  for (int k = 0; k < kMoveKinds; ++k) CHECK(a.stats.acceptances[k] <= a.stats.proposals[k]);

  ChainSettings bad = s;
  bad.burn_in = 2000;
  CHECK_THROWS(run_chain(target, bad, 1));
  bad = s;
  bad.thin = 0;
  CHECK_THROWS(run_chain(target, bad, 1));
}

TEST_CASE("multi-chain output does not depend on the worker count") {
  Fixture fx(2, 40);
  GibbsTarget target(fx.data, fx.constants, fx.prior);
  ChainSettings s;
  s.iterations = 1500;
  const MultiChainResult one = run_chains(target, s, 3, 77, 1);
  const MultiChainResult three = run_chains(target, s, 3, 77, 3);
  const auto a = one.pooled_draws(), b = three.pooled_draws();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(a[i].beta == b[i].beta);
  CHECK(one.psrf == three.psrf);
  CHECK(one.chains[1].seed == derive_seed(77, 1));
}

TEST_CASE("cached risk stays consistent with recomputation") {
  Fixture fx(3, 200);
  GibbsTarget target(fx.data, fx.constants, fx.prior);
  ChainSettings s;
  s.iterations = 5000;
  const ChainResult r = run_chain(target, s, 3);
  CHECK(r.max_cache_drift < 1e-9);
  for (const PosteriorDraw& d : r.draws) {
    REQUIRE(std::abs(d.B.norm() - 1.0) < 1e-9);
    REQUIRE(weighted_l1_norm(d.beta) <= 2.0 + 1e-12);
    REQUIRE(std::abs(d.gamma.sum() - 1.0) < 1e-12);
  }
}

TEST_CASE("step sizes are tuned toward the target acceptance band") {
  // A sharp posterior; with a constant link or at the default temperature B is
  // nearly prior-flat and the steps run into their clamps.
  Fixture fx(3, 200, 1.0, 1, {0.0, 0.5});
  GibbsTarget target(fx.data, fx.constants.with_lambda(200.0), fx.prior);
  ChainSettings s;
  s.iterations = 40000;
  s.burn_in = 20000;
  const ChainResult r = run_chain(target, s, 4);
  for (MoveKind k : {MoveKind::Rotation, MoveKind::Spectrum, MoveKind::Coefficient}) {
    const double rate = r.stats.acceptance_rate(k);
    CHECK(rate > 0.15);
    CHECK(rate < 0.55);
  }
  ChainSettings frozen = s;
  frozen.schedule.tune_during_burn_in = false;
  const ChainResult f = run_chain(target, frozen, 4);
  CHECK(f.tuned_steps.rotation == frozen.schedule.initial_steps.rotation);
}

TEST_CASE("lambda = 0 with M = 1 recovers the uniform coefficient prior") {
  Fixture fx(1, 20, 0.0);
  fx.prior.max_dimension = 1;
  GibbsTarget target(fx.data, fx.constants, fx.prior);
  ChainSettings s;
  s.schedule.dimension_every = 0;
  s.thin = 12;
  s.burn_in = 2000;
  s.iterations = s.burn_in + 25000 * s.thin;
  const MultiChainResult fit = run_chains(target, s, 4, 5);
  std::vector<double> b;
  for (const PosteriorDraw& d : fit.pooled_draws()) b.push_back(d.beta[0]);
  REQUIRE(b.size() == 100000);
  const double D = ks_distance(
      b, [](double x, const void*) { return std::clamp((x + 2.0) / 4.0, 0.0, 1.0); }, nullptr);
  CHECK(D < 0.02);
}

TEST_CASE("posterior beats the prior at learning the truth") {
  Fixture fx(2, 200);
  GibbsTarget target(fx.data, fx.constants.with_lambda(50.0), fx.prior);
  ChainSettings s;
  s.iterations = 20000;
  const MultiChainResult fit = run_chains(target, s, 2, 6);
  Rng eval_rng(7);
  const EvaluationSet eval(fx.truth, default_design_sampler(2), 2000, eval_rng);
  std::vector<double> post, prior;
  for (const PosteriorDraw& d : fit.pooled_draws()) post.push_back(eval.excess_risk(d.B, d.beta).estimate);
  Rng prior_rng(8);
  for (int k = 0; k < 2000; ++k) {
    const ChainState p = target.sample_prior_state(prior_rng);
    prior.push_back(eval.excess_risk(p.B, p.beta).estimate);
  }
  const double se = std::hypot(batch_means_stderr(post), standard_error(prior));
  CHECK(mean(post) + 5.0 * se < mean(prior));
}

TEST_CASE("draw estimator selects uniformly") {
  std::vector<PosteriorDraw> draws(10);
  for (int i = 0; i < 10; ++i) draws[i].iteration = i;
  Rng rng(9);
  std::vector<int> hits(10, 0);
  for (int k = 0; k < 100000; ++k) ++hits[draw_estimator(draws, rng).iteration];
  for (int h : hits) CHECK(std::abs(h / 100000.0 - 0.1) < 0.01);
  std::vector<PosteriorDraw> single(1);
  single[0].iteration = 42;
  CHECK(draw_estimator(single, rng).iteration == 42);
  CHECK_THROWS_AS(draw_estimator({}, rng), InvalidParameter);

  // Selection depends on positions only, not contents.
  std::vector<PosteriorDraw> shuffled = draws;
  for (auto& d : shuffled) d.iteration = 9 - d.iteration;
  Rng r1(10), r2(10);
  for (int k = 0; k < 100; ++k) REQUIRE(&draw_estimator(draws, r1) - draws.data() == &draw_estimator(shuffled, r2) - shuffled.data());
}
