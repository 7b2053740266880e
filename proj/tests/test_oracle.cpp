#include <doctest.h>

#include <cmath>

#include "lrsim/datagen.hpp"
#include "lrsim/errors.hpp"
#include "lrsim/oracle.hpp"
#include "lrsim/risk.hpp"
#include "lrsim/validate.hpp"

using namespace lrsim;

namespace {
LabeledDataset toy(Index d, int n, std::uint64_t seed) {
  Rng rng(seed);
  LinkSpec link;
  link.kind = LinkSpec::Kind::Coefficients;
  link.beta = {0.3, 0.2};
  const TruthSpec t = make_truth(d, 1, link, 1.0, rng);
  return generate(t, n, NoiseSpec{NoiseKind::Gaussian, 0.5}, seed + 1);
}
PriorConfig prior(Index d, int n, int cap) {
  PriorConfig p;
  p.d = d;
  p.n = n;
  p.max_dimension = cap;
  if (d == 2) p.alpha = {0.5, 0.5};
  return p;
}
}  // namespace

TEST_CASE("gibbs weights follow the exponential tilt") {
  const std::vector<double> w = gibbs_weights({0.0, 0.0}, {0.3, 0.8}, 2.0);
  CHECK(w[0] / w[1] == doctest::Approx(std::exp(2.0 * 0.5)).epsilon(1e-14));
  CHECK(w[0] + w[1] == doctest::Approx(1.0).epsilon(1e-15));
  const std::vector<double> z = gibbs_weights({std::log(0.25), kOutOfSupport, std::log(0.75)}, {1, 2, 3}, 0.0);
  CHECK(z[0] == doctest::Approx(0.25));
  CHECK(z[1] == 0.0);
  CHECK_THROWS(gibbs_weights({kOutOfSupport}, {1.0}, 1.0));
}

TEST_CASE("lambda = 0 returns the prior cell masses") {
  const LabeledDataset d1 = toy(1, 30, 1);
  const ModelConstants k0 = lambda_schedule(1, 0.5, 0.5, 30).with_lambda(0.0);
  GridSpec g{prior(1, 30, 1), 1, 1, 40, 1, 3};
  const GridPosterior p = exact_posterior_oracle(d1, k0, g);
  CHECK(std::abs(p.total_weight() - 1.0) < 1e-12);
  for (double w : p.weights) CHECK(w == doctest::Approx(1.0 / 40).epsilon(1e-12));
  CHECK(std::abs(p.mean_beta1()) < 1e-12);

  GridSpec g2{prior(1, 30, 2), 1, 1, 40, 20, 4};
  const GridPosterior p2 = exact_posterior_oracle(d1, k0, g2);
  const std::vector<double> pmf = model_dimension_pmf(g2.prior);
  CHECK(std::abs(p2.probability_of_dimension(1) - pmf[0] / (pmf[0] + pmf[1])) < 2e-3);
}

TEST_CASE("d = 2 matrix cells carry the Beta spectrum masses") {
  const LabeledDataset d2 = toy(2, 30, 2);
  const ModelConstants k0 = lambda_schedule(1, 0.5, 0.5, 30).with_lambda(0.0);
  GridSpec g{prior(2, 30, 1), 8, 16, 10, 1, 1};
  const GridPosterior p = exact_posterior_oracle(d2, k0, g);
  CHECK(std::abs(p.total_weight() - 1.0) < 1e-12);
  // Arcsine cells are equal-mass under Beta(1/2, 1/2).
  double first_cell = 0.0;
  for (std::size_t k = 0; k < p.cells.size(); ++k) {
    if (p.cells[k].angle == p.cells[0].angle && p.cells[k].gamma1 == p.cells[0].gamma1) first_cell += p.weights[k];
  }
  CHECK(first_cell == doctest::Approx(1.0 / (8 * 16)).epsilon(1e-10));
}

TEST_CASE("cell risks agree with the direct empirical risk") {
  const LabeledDataset d1 = toy(1, 25, 3);
  const ModelConstants k = lambda_schedule(1, 0.5, 0.5, 25).with_lambda(7.0);
  GridSpec g{prior(1, 25, 2), 1, 1, 8, 4, 1};
  const GridPosterior p = exact_posterior_oracle(d1, k, g);
  const IndexMatrix one = IndexMatrix::from_dense(Matrix::Identity(1, 1));
  for (const auto& [cell, risk] : [&] {
         std::vector<std::pair<OracleCell, double>> v;
         for (std::size_t i = 0; i < p.cells.size(); ++i) v.emplace_back(p.cells[i], p.risks[i]);
         return v;
       }()) {
    Vector beta(cell.M);
    beta[0] = cell.beta1;
    if (cell.M == 2) beta[1] = cell.beta2;
    REQUIRE(std::abs(empirical_risk(d1, one, LinkFunction(beta, 2.0)) - risk) < 1e-12);
  }
}

TEST_CASE("oracle refuses oversized or unsupported grids") {
  const LabeledDataset d1 = toy(1, 10, 4);
  const ModelConstants k = lambda_schedule(1, 0.5, 0.5, 10);
  GridSpec huge{prior(1, 10, 2), 1, 1, 5000, 5000, 1};
  CHECK(huge.cell_count() > kMaxOracleCells);
  CHECK_THROWS_AS(exact_posterior_oracle(d1, k, huge), InvalidParameter);
  GridSpec deep{prior(1, 10, 3), 1, 1, 10, 10, 1};
  CHECK_THROWS_AS(exact_posterior_oracle(d1, k, deep), InvalidParameter);
  const LabeledDataset d3 = toy(3, 10, 5);
  GridSpec wide{prior(3, 10, 1), 4, 4, 10, 1, 1};
  CHECK_THROWS_AS(exact_posterior_oracle(d3, k, wide), InvalidParameter);
}

TEST_CASE("chain and oracle agree on small budgets") {
  OracleParams p;
  p.iterations = 20000;
  const SuiteResult r = oracle_suite(p);
  CHECK(r.passed);
  CHECK(r.value("d1_z") <= 3.0);
  CHECK(r.value("d2_z") <= 3.0);
}
