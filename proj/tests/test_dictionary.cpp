#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lrsim/dictionary.hpp"
#include "lrsim/errors.hpp"

using namespace lrsim;

namespace {
Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}
}  // namespace

TEST_CASE("basis examples") {
  CHECK(eval_basis(1, 0.37) == 1.0);
  CHECK(eval_basis(2, 0.0) == 1.0);
  CHECK(eval_basis(3, 0.5) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(eval_basis(4, 0.25) == doctest::Approx(std::cos(std::numbers::pi * 2 * 0.25)));
  CHECK_THROWS_AS(eval_basis(2, 1.0 + 1e-9), DomainError);
  CHECK_THROWS_AS(eval_basis(2, -1.5), DomainError);
  CHECK_THROWS(eval_basis(0, 0.0));
}

TEST_CASE("basis bounded with derivative bound j * pi") {
  const DictionaryBasis basis = DictionaryBasis::trigonometric();
  CHECK(basis.c_phi() == std::numbers::pi);
  const int grid = 10000;
  const double h = 1e-6;
  for (int j = 1; j <= 32; ++j) {
    double worst = 0.0;
    for (int i = 0; i <= grid; ++i) {
      const double t = -1.0 + 2.0 * i / grid;
      REQUIRE(std::abs(basis.eval(j, t)) <= 1.0);
      const double lo = std::max(-1.0, t - h), hi = std::min(1.0, t + h);
      worst = std::max(worst, std::abs(basis.eval(j, hi) - basis.eval(j, lo)) / (hi - lo));
    }
    CHECK(worst <= basis.derivative_bound(j) + 1e-6);
  }
}

TEST_CASE("link evaluation") {
  CHECK(eval_link(LinkFunction(vec({0.5}), 2.0), -0.7) == 0.5);
  CHECK(eval_link(LinkFunction(vec({0.0, 1.0}), 2.0), 0.0) == 1.0);
  const double expect = 0.3 + 0.2 * std::cos(std::numbers::pi / 4) + 0.1 * std::sin(std::numbers::pi / 4);
  CHECK(std::abs(eval_link(LinkFunction(vec({0.3, 0.2, 0.1}), 2.0), 0.25) - expect) < 1e-12);
  CHECK(std::abs(expect - 0.512132) < 1e-6);
  CHECK_THROWS_AS(eval_link(LinkFunction(vec({0.3}), 2.0), 2.0), DomainError);
}

TEST_CASE("link is linear in beta") {
  Rng rng(3);
  std::uniform_real_distribution<double> u(-0.1, 0.1), t(-1.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    Vector a(5), b(5);
    for (int j = 0; j < 5; ++j) { a[j] = u(rng); b[j] = u(rng); }
    const double x = t(rng);
    const double lhs = eval_link(LinkFunction(2.0 * a - 0.5 * b, 10.0), x);
    const double rhs = 2.0 * eval_link(LinkFunction(a, 10.0), x) - 0.5 * eval_link(LinkFunction(b, 10.0), x);
    REQUIRE(std::abs(lhs - rhs) < 1e-12);
  }
}

TEST_CASE("weighted l1 norm") {
  CHECK(weighted_l1_norm(vec({0.0, 0.0})) == 0.0);
  CHECK(weighted_l1_norm(vec({0.5, 0.25})) == 1.0);
  CHECK(weighted_l1_norm(vec({1.0, -0.5, 1.0 / 3})) == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("weighted ball triangle property") {
  Rng rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    Vector g(4), delta(4);
    for (int j = 0; j < 4; ++j) { g[j] = u(rng); delta[j] = u(rng); }
    g *= 1.0 / std::max(1.0, weighted_l1_norm(g));           // ||g||_M <= C = 1
    delta *= u(rng) / std::max(1e-12, weighted_l1_norm(delta));  // ||f - g||_M <= 1
    REQUIRE(weighted_l1_norm(g + delta) <= 2.0 + 1e-12);
  }
}

TEST_CASE("link validates its ball and labels by last nonzero") {
  CHECK_THROWS_AS(LinkFunction(vec({1.0, 1.0}), 2.0), InvalidParameter);
  CHECK_NOTHROW(LinkFunction(vec({1.0, 0.5}), 2.0));
  CHECK_THROWS_AS(LinkFunction(Vector(0), 2.0), InvalidDimension);
  CHECK(LinkFunction(vec({0.3, 0.2, 0.0}), 2.0).active_dimension() == 2);
  CHECK(LinkFunction(vec({0.0, 0.0}), 2.0).active_dimension() == 1);
  CHECK(LinkFunction(vec({0.3, -0.2}), 2.0).sup_norm_bound() == doctest::Approx(0.5));
}

TEST_CASE("sobolev ellipsoid") {
  const double radius = 6.0 / (std::numbers::pi * std::numbers::pi);
  CHECK(sobolev_ellipsoid_check(LinkFunction(vec({0.0, 0.0}), 2.0), 2.0, radius));
  CHECK(sobolev_ellipsoid_check(LinkFunction(vec({std::sqrt(radius), 0.0}), 2.0), 3.0, radius));
  CHECK_FALSE(sobolev_ellipsoid_check(LinkFunction(vec({0.0, std::sqrt(radius)}), 2.0), 2.0, radius));
  CHECK(sobolev_energy(vec({0.0, 1.0}), 2.0) == 16.0);
}
