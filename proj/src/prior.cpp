#include "lrsim/prior.hpp"

#include <algorithm>
#include <cmath>

#include "lrsim/errors.hpp"

namespace lrsim {

void PriorConfig::validate() const {
  if (d < 1) throw InvalidDimension("prior dimension d must be at least 1");
  if (n < 1) throw InvalidParameter("prior sample size n must be at least 1");
  if (!(C >= 1.0)) throw InvalidParameter("C must be at least 1");
  if (!(decay_base > 1.0)) throw InvalidParameter("decay base must exceed 1");
  if (max_dimension < 0) throw InvalidParameter("max_dimension must be nonnegative");
  if (!alpha.empty()) {
    if (static_cast<Index>(alpha.size()) != d) throw InvalidDimension("alpha length must equal d");
    double s = 0.0;
    for (double a : alpha) {
      if (!(a > 0.0)) throw InvalidParameter("Dirichlet parameters must be positive");
      s += a;
    }
    if (std::abs(s - 1.0) > 1e-12) throw InvalidParameter("Dirichlet parameters must sum to one");
  }
}

std::vector<double> PriorConfig::dirichlet_parameters() const {
  if (!alpha.empty()) return alpha;
  return std::vector<double>(static_cast<std::size_t>(d), 1.0 / static_cast<double>(d));
}

int PriorConfig::dimension_cap() const { return max_dimension > 0 ? std::min(n, max_dimension) : n; }

IndexMatrix sample_matrix_prior(const PriorConfig& cfg, Rng& rng) {
  cfg.validate();
  const auto alpha = cfg.dirichlet_parameters();
  OrthogonalFactor v = sample_haar_orthogonal(cfg.d, rng);
  SpectrumSimplex gamma = sample_dirichlet(alpha, rng);
  return assemble_index_matrix(v, gamma);
}

namespace {

// log sum_{m=1}^{K} b^{-m} = log(1 - b^{-K}) - log(b - 1)
double log_dimension_normalizer(int cap, double base) {
  return std::log1p(-std::pow(base, -static_cast<double>(cap))) - std::log(base - 1.0);
}

}  // namespace

std::vector<double> model_dimension_pmf(const PriorConfig& cfg) {
  const int cap = cfg.dimension_cap();
  std::vector<double> pmf(static_cast<std::size_t>(cap));
  for (int m = 1; m <= cap; ++m) pmf[static_cast<std::size_t>(m - 1)] = std::exp(log_dimension_weight(m, cfg));
  return pmf;
}

double log_dimension_weight(int m, const PriorConfig& cfg) {
  const int cap = cfg.dimension_cap();
  if (m < 1 || m > cap) return kOutOfSupport;
  return -m * std::log(cfg.decay_base) - log_dimension_normalizer(cap, cfg.decay_base);
}

int sample_model_dimension(const PriorConfig& cfg, Rng& rng) {
  cfg.validate();
  const int cap = cfg.dimension_cap();
  const double u = uniform01(rng);
  double cumulative = 0.0;
  for (int m = 1; m < cap; ++m) {
    cumulative += std::exp(log_dimension_weight(m, cfg));
    if (u < cumulative) return m;
  }
  return cap;
}

Vector sample_coefficients_uniform(int m, double budget, Rng& rng) {
  if (m < 1) throw InvalidDimension("model dimension must be at least 1");
  if (!(budget > 0.0)) throw InvalidParameter("budget must be positive");
  // z_j = j * beta_j is uniform on the l1 ball of radius `budget`.
  Vector z(m);
  double total = 0.0;
  std::exponential_distribution<double> expo(1.0);
  for (Index j = 0; j < m; ++j) {
    const double e = expo(rng);
    z[j] = (uniform01(rng) < 0.5) ? -e : e;
    total += e;
  }
  const double radius = budget * std::pow(uniform_open_closed(rng), 1.0 / m);
  Vector beta(m);
  for (Index j = 0; j < m; ++j) beta[j] = z[j] / total * radius / static_cast<double>(j + 1);
  // Rounding may push a boundary draw a hair outside the ball.
  const double norm = weighted_l1_norm(beta);
  if (norm > budget) beta *= budget / norm;
  return beta;
}

LinkFunction sample_link_prior(const PriorConfig& cfg, Rng& rng) {
  const int m = sample_model_dimension(cfg, rng);
  return LinkFunction(sample_coefficients_uniform(m, cfg.budget(), rng), cfg.budget());
}

double log_ball_volume(int m, double budget) {
  return m * std::log(2.0 * budget) - 2.0 * std::lgamma(m + 1.0);
}

double log_dirichlet_density(const Vector& gamma, std::span<const double> alpha) {
  if (static_cast<std::size_t>(gamma.size()) != alpha.size()) return kOutOfSupport;
  double sum_alpha = 0.0;
  double sum = 0.0;
  double log_density = 0.0;
  for (Index i = 0; i < gamma.size(); ++i) {
    const double g = gamma[i];
    const double a = alpha[static_cast<std::size_t>(i)];
    if (!(g >= 0.0) || g > 1.0) return kOutOfSupport;
    sum += g;
    sum_alpha += a;
    log_density += (a - 1.0) * std::log(std::max(g, kDirichletClamp)) - std::lgamma(a);
  }
  if (std::abs(sum - 1.0) > 1e-9) return kOutOfSupport;
  if (gamma.size() == 1) return 0.0;  // point mass
  return log_density + std::lgamma(sum_alpha);
}

LogPriorComponents log_prior_components(const Vector& gamma, const Vector& beta, const PriorConfig& cfg) {
  LogPriorComponents out;
  out.dirichlet = log_dirichlet_density(gamma, cfg.dirichlet_parameters());
  const int m = static_cast<int>(beta.size());
  out.dimension = log_dimension_weight(m, cfg);
  if (m < 1 || !beta.allFinite() || weighted_l1_norm(beta) > cfg.budget() + kBallSlack) {
    out.ball = kOutOfSupport;
  } else {
    out.ball = -log_ball_volume(m, cfg.budget());
  }
  return out;
}

}  // namespace lrsim
