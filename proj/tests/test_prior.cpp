#include <doctest.h>

#include <cmath>

#include "lrsim/errors.hpp"
#include "lrsim/manifold.hpp"
#include "lrsim/prior.hpp"
#include "lrsim/stats.hpp"

using namespace lrsim;

namespace {
PriorConfig config(Index d, int n, double C = 1.0) {
  PriorConfig c;
  c.d = d;
  c.n = n;
  c.C = C;
  return c;
}
Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}
}  // namespace

TEST_CASE("config validation") {
  PriorConfig c = config(3, 10);
  CHECK_NOTHROW(c.validate());
  c.alpha = {0.5, 0.5, 0.5};
  CHECK_THROWS_AS(c.validate(), InvalidParameter);
  c.alpha = {};
  c.C = 0.5;
  CHECK_THROWS_AS(c.validate(), InvalidParameter);
  c = config(3, 10);
  c.max_dimension = 4;
  CHECK(c.dimension_cap() == 4);
  CHECK(config(3, 10).dimension_cap() == 10);
  CHECK(config(4, 1).dirichlet_parameters() == std::vector<double>(4, 0.25));
}

TEST_CASE("matrix prior examples") {
  Rng rng(1);
  for (int k = 0; k < 100; ++k) CHECK(sample_matrix_prior(config(1, 5), rng).dense()(0, 0) == doctest::Approx(1.0));
  double rank_sum = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const IndexMatrix b = sample_matrix_prior(config(5, 5), rng);
    rank_sum += effective_rank(b.spectrum().eigenvalues(), 0.5);
  }
  CHECK(rank_sum / 10000 <= 1.5);
  for (int k = 0; k < 1000; ++k) REQUIRE(sample_matrix_prior(config(3, 5), rng).eigenvalues().minCoeff() >= -1e-10);
}

TEST_CASE("dimension mixture") {
  Rng rng(2);
  for (int k = 0; k < 100; ++k) CHECK(sample_model_dimension(config(2, 1), rng) == 1);
  const std::vector<double> pmf = model_dimension_pmf(config(2, 10));
  double s = 0.0;
  for (double p : pmf) s += p;
  CHECK(std::abs(s - 1.0) < 1e-12);
  // 0.1 / sum_{m<=10} 10^-m = 0.9 / (1 - 1e-10)
  CHECK(std::abs(pmf[0] - 0.9000000000900000) < 1e-15);
  long c1 = 0, c2 = 0;
  for (int k = 0; k < 100000; ++k) {
    const int m = sample_model_dimension(config(2, 10), rng);
    c1 += m == 1;
    c2 += m == 2;
  }
  CHECK(std::abs(double(c2) / c1 - 0.1) < 0.01);
  for (int n : {1, 3, 50, 400}) {
    double t = 0.0;
    for (double p : model_dimension_pmf(config(2, n))) t += p;
    CHECK(std::abs(t - 1.0) < 1e-12);
  }
}

TEST_CASE("uniform ball sampler") {
  Rng rng(3);
  double mean1 = 0.0;
  for (int k = 0; k < 100000; ++k) {
    const double b = sample_coefficients_uniform(1, 2.0, rng)[0];
    REQUIRE(std::abs(b) <= 2.0);
    mean1 += b;
  }
  CHECK(std::abs(mean1 / 100000) < 0.02);
  long inner = 0;
  for (int k = 0; k < 100000; ++k) {
    const Vector b = sample_coefficients_uniform(2, 1.0, rng);
    REQUIRE(weighted_l1_norm(b) <= 1.0 + 1e-12);
    inner += weighted_l1_norm(b) <= 0.5;
  }
  CHECK(std::abs(inner / 100000.0 - 0.25) < 0.01);
}

TEST_CASE("ball sampler matches rejection sampling on half-space events") {
  Rng rng(4), ref(5), ev(6);
  const int n = 40000;
  for (int m = 1; m <= 3; ++m) {
    std::vector<Vector> a(n), b(n);
    for (int k = 0; k < n; ++k) a[k] = sample_coefficients_uniform(m, 2.0, rng);
    // Rejection from the bounding box prod_j [-2/j, 2/j].
    for (int k = 0; k < n;) {
      Vector z(m);
      for (int j = 0; j < m; ++j) z[j] = (2.0 * uniform01(ref) - 1.0) * 2.0 / (j + 1);
      if (weighted_l1_norm(z) <= 2.0) b[k++] = z;
    }
    for (int e = 0; e < 10; ++e) {
      Vector w(m);
      for (int j = 0; j < m; ++j) w[j] = standard_normal(ev);
      const double c = 0.3 * standard_normal(ev);
      double pa = 0.0, pb = 0.0;
      for (int k = 0; k < n; ++k) {
        pa += w.dot(a[k]) <= c;
        pb += w.dot(b[k]) <= c;
      }
      pa /= n;
      pb /= n;
      const double se = std::sqrt((pa * (1 - pa) + pb * (1 - pb)) / n);
      CHECK(std::abs(pa - pb) <= 3.0 * se + 1e-12);
    }
  }
}

TEST_CASE("link prior draws") {
  Rng rng(7);
  long first = 0;
  for (int k = 0; k < 100000; ++k) {
    const LinkFunction f = sample_link_prior(config(2, 10), rng);
    REQUIRE(weighted_l1_norm(f) <= 2.0 + 1e-12);
    REQUIRE(f.sup_norm_bound() <= 2.0 + 1e-12);
    first += f.dimension() == 1;
  }
  CHECK(first / 100000.0 >= 0.88);
  for (int k = 0; k < 100; ++k) {
    const LinkFunction f = sample_link_prior(config(2, 1), rng);
    REQUIRE(f.dimension() == 1);
    REQUIRE(std::abs(f.coefficient(1)) <= 2.0);
  }
}

TEST_CASE("log prior components") {
  const PriorConfig c = config(2, 10);
  const LogPriorComponents one = log_prior_components(vec({0.5, 0.5}), vec({0.3}), c);
  CHECK(one.ball == doctest::Approx(-std::log(4.0)).epsilon(1e-14));
  CHECK(one.dimension == doctest::Approx(std::log(model_dimension_pmf(c)[0])).epsilon(1e-14));
  CHECK(log_ball_volume(3, 2.0) == doctest::Approx(3 * std::log(4.0) - 2 * std::log(6.0)).epsilon(1e-14));

  const LogPriorComponents out = log_prior_components(vec({0.5, 0.5}), vec({3.0}), c);
  CHECK(out.ball == kOutOfSupport);
  CHECK_FALSE(out.in_support());

  // Boundary gamma with alpha < 1: finite after clamping, larger than interior.
  const LogPriorComponents edge = log_prior_components(vec({1.0, 0.0}), vec({0.3}), c);
  CHECK(std::isfinite(edge.dirichlet));
  CHECK(edge.dirichlet > one.dirichlet);

  // Beta(1/2, 1/2) density at 1/2 is 2 / pi.
  CHECK(one.dirichlet == doctest::Approx(std::log(2.0 / std::numbers::pi)).epsilon(1e-13));

  PriorConfig capped = c;
  capped.max_dimension = 2;
  CHECK(log_prior_components(vec({0.5, 0.5}), vec({0.1, 0.1, 0.1}), capped).dimension == kOutOfSupport);
}
