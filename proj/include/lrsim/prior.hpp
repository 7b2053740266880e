#pragma once

// Product prior over (B, f): Haar eigenvectors with a Dirichlet spectrum for
// the index matrix, and a geometric mixture over the model dimension M of
// uniform laws on weighted-l1 balls for the link.

#include <limits>
#include <span>
#include <vector>

#include "lrsim/dictionary.hpp"
#include "lrsim/manifold.hpp"

namespace lrsim {

inline constexpr double kOutOfSupport = -std::numeric_limits<double>::infinity();

/// Floor applied to spectrum entries when evaluating the Dirichlet density.
inline constexpr double kDirichletClamp = 1e-300;

struct PriorConfig {
  Index d = 1;
  /// Dirichlet parameters; empty means 1/d each.
  std::vector<double> alpha;
  /// Sample size; the mixture over M is truncated at n.
  int n = 1;
  /// Link sup-norm constant; coefficients live in the ball of radius C + 1.
  double C = 1.0;
  double decay_base = 10.0;
  /// Optional tighter cap on M (0 = use n).
  int max_dimension = 0;

  /// Throws InvalidParameter when an invariant fails.
  void validate() const;

  std::vector<double> dirichlet_parameters() const;
  int dimension_cap() const;
  double budget() const { return C + 1.0; }
};

IndexMatrix sample_matrix_prior(const PriorConfig& cfg, Rng& rng);

/// P(M = m) proportional to decay_base^{-m}, m = 1..dimension_cap().
int sample_model_dimension(const PriorConfig& cfg, Rng& rng);

/// Exact probabilities of the dimension mixture.
std::vector<double> model_dimension_pmf(const PriorConfig& cfg);

/// Uniform draw from {beta in R^M : sum_j j|beta_j| <= budget}.
Vector sample_coefficients_uniform(int m, double budget, Rng& rng);

LinkFunction sample_link_prior(const PriorConfig& cfg, Rng& rng);

/// log volume of {beta in R^M : sum_j j|beta_j| <= budget}, which is
/// (2 budget)^M / (M!)^2.
double log_ball_volume(int m, double budget);

double log_dimension_weight(int m, const PriorConfig& cfg);

/// Dirichlet log density on the simplex; entries are clamped to
/// kDirichletClamp before taking logs.
double log_dirichlet_density(const Vector& gamma, std::span<const double> alpha);

struct LogPriorComponents {
  double dirichlet = 0.0;
  double dimension = 0.0;
  double ball = 0.0;

  double total() const { return dirichlet + dimension + ball; }
  bool in_support() const { return total() != kOutOfSupport; }
};

/// Log densities of the non-Haar prior factors. Any out-of-support input
/// sets the affected component to kOutOfSupport.
LogPriorComponents log_prior_components(const Vector& gamma, const Vector& beta, const PriorConfig& cfg);

}  // namespace lrsim
