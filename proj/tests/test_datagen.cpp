#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lrsim/datagen.hpp"
#include "lrsim/errors.hpp"
#include "lrsim/risk.hpp"

using namespace lrsim;

namespace {
LinkSpec coefficients(std::vector<double> beta) {
  LinkSpec s;
  s.kind = LinkSpec::Kind::Coefficients;
  s.beta = std::move(beta);
  return s;
}
LinkSpec constant(double c) {
  LinkSpec s;
  s.kind = LinkSpec::Kind::Constant;
  s.value = c;
  return s;
}
}  // namespace

TEST_CASE("truth construction") {
  Rng rng(1);
  const TruthSpec t = make_truth(3, 1, LinkSpec{}, 1.0, rng);
  CHECK(std::abs(t.B_star.frobenius_norm() - 1.0) < 1e-9);
  const Vector v = t.B_star.factor().matrix().col(0);
  CHECK((t.B_star.dense() - v * v.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(t.sobolev_k.value() == 2.0);
  CHECK(sobolev_ellipsoid_check(t.f_star.expansion(), 2.0, sobolev_radius(1.0)));
  CHECK(t.f_star.expansion().dimension() == 16);

  const TruthSpec full = make_truth(4, 4, constant(0.2), 1.0, rng);
  const Vector ev = full.B_star.eigenvalues();
  for (int i = 0; i < 4; ++i) CHECK(std::abs(ev[i] - 0.5) < 1e-9);

  CHECK_THROWS_AS(make_truth(3, 4, LinkSpec{}, 1.0, rng), InvalidParameter);
  CHECK_THROWS_AS(make_truth(3, 1, constant(1.5), 1.0, rng), InvalidParameter);
  CHECK_THROWS_AS(make_truth(3, 1, coefficients({0.5, 0.5}), 1.0, rng), InvalidParameter);
  LinkSpec tanh;
  tanh.kind = LinkSpec::Kind::Tanh;
  const TruthSpec th = make_truth(2, 1, tanh, 1.0, rng);
  CHECK(th.f_star(0.5) == doctest::Approx(std::tanh(0.5)));
}

TEST_CASE("sobolev coefficients sit on the ellipsoid") {
  const Vector b = sobolev_coefficients(2.0, 16, sobolev_radius(1.0));
  double energy = 0.0;
  for (int j = 1; j <= 16; ++j) energy += std::pow(j, 4.0) * b[j - 1] * b[j - 1];
  CHECK(energy == doctest::Approx(6.0 / (std::numbers::pi * std::numbers::pi)).epsilon(1e-12));
  CHECK(b[1] / b[0] == doctest::Approx(std::pow(2.0, -2.5)).epsilon(1e-12));
}

TEST_CASE("design draws are symmetric inside the unit Frobenius ball") {
  Rng rng(2);
  for (int i = 0; i < 10000; ++i) {
    const Matrix x = sample_design_matrix(3, rng);
    REQUIRE(x.norm() <= 1.0 + 1e-12);
    REQUIRE((x - x.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("index law has a bounded density on [-1, 1]") {
  Rng rng(3);
  const TruthSpec t = make_truth(3, 1, LinkSpec{}, 1.0, rng);
  const int n = 100000, bins = 20;
  std::vector<int> hist(bins, 0);
  for (int i = 0; i < n; ++i) {
    const double s = trace_inner(sample_design_matrix(3, rng), t.B_star);
    REQUIRE(std::abs(s) <= 1.0);
    ++hist[std::min(bins - 1, int((s + 1.0) / 2.0 * bins))];
  }
  const double width = 2.0 / bins;
  double peak = 0.0;
  for (int h : hist) peak = std::max(peak, h / double(n) / width);
  CHECK(peak < 3.0);
  CHECK(hist.front() / double(n) / width < 0.5);
  CHECK(hist.back() / double(n) / width < 0.5);
}

TEST_CASE("noise examples") {
  Rng rng(4);
  CHECK(sample_noise(NoiseSpec{NoiseKind::Gaussian, 0.0}, 100, rng).cwiseAbs().maxCoeff() == 0.0);
  const Vector g = sample_noise(NoiseSpec{NoiseKind::Gaussian, 1.0}, 1000000, rng);
  CHECK(std::abs(g.squaredNorm() / g.size() - 1.0) < 0.005);
  const Vector u = sample_noise(NoiseSpec{NoiseKind::BoundedUniform, 1.0}, 100000, rng);
  CHECK(u.cwiseAbs().maxCoeff() <= std::sqrt(3.0));
  CHECK(parse_noise_kind("bounded-uniform") == NoiseKind::BoundedUniform);
  CHECK_THROWS_AS(parse_noise_kind("cauchy"), InvalidParameter);
}

TEST_CASE("noise satisfies the moment condition") {
  Rng rng(5);
  for (NoiseKind kind : {NoiseKind::Gaussian, NoiseKind::BoundedUniform}) {
    const NoiseSpec spec{kind, 0.7};
    const Vector e = sample_noise(spec, 1000000, rng);
    double fact = 1.0;
    for (int k = 2; k <= 4; ++k) {
      fact *= k;
      const double moment = e.array().abs().pow(k).mean();
      CHECK(moment <= fact / 2.0 * spec.sigma * spec.sigma * std::pow(spec.L(), k - 2) * 1.1);
    }
  }
}

TEST_CASE("generated datasets") {
  Rng rng(6);
  const TruthSpec t = make_truth(3, 1, LinkSpec{}, 1.0, rng);
  const LabeledDataset clean = generate(t, 500, NoiseSpec{NoiseKind::Gaussian, 0.0}, 9);
  CHECK_NOTHROW(validate_dataset(clean, t));
  CHECK(empirical_risk(clean, t.B_star, t.f_star.expansion()) == 0.0);

  const TruthSpec c = make_truth(2, 1, constant(0.4), 1.0, rng);
  const LabeledDataset flat = generate(c, 100, NoiseSpec{NoiseKind::Gaussian, 0.0}, 10);
  CHECK(flat.y.cwiseAbs().minCoeff() == 0.4);
  CHECK(flat.y.cwiseAbs().maxCoeff() == 0.4);

  const LabeledDataset noisy = generate(t, 10000, NoiseSpec{NoiseKind::Gaussian, 0.3}, 11);
  CHECK(std::abs(empirical_risk(noisy, t.B_star, t.f_star.expansion()) - 0.09) < 0.01);

  const LabeledDataset again = generate(t, 10000, NoiseSpec{NoiseKind::Gaussian, 0.3}, 11);
  CHECK(again.x == noisy.x);
  CHECK(again.y == noisy.y);

  for (int i = 0; i < 5; ++i) CHECK(noisy.design(i).norm() <= 1.0 + 1e-12);
  CHECK((flatten(noisy.design(3)).transpose() - noisy.x.row(3)).norm() == 0.0);
}

TEST_CASE("validator names the violation") {
  Rng rng(7);
  const TruthSpec t = make_truth(2, 1, LinkSpec{}, 1.0, rng);
  LabeledDataset data = generate(t, 10, NoiseSpec{NoiseKind::Gaussian, 0.1}, 12);
  data.x.row(4) *= 3.0;
  CHECK_THROWS_WITH_AS(validate_dataset(data, t), doctest::Contains("record 4"), InvalidParameter);
}
