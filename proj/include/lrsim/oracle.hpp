#pragma once

// Brute-force quadrature of the Gibbs posterior on tiny instances
// (d <= 2, M <= 2), used to cross-check the Markov chain.

#include <vector>

#include "lrsim/datagen.hpp"
#include "lrsim/prior.hpp"
#include "lrsim/risk.hpp"

namespace lrsim {

inline constexpr long kMaxOracleCells = 10'000'000;

struct GridSpec {
  PriorConfig prior;
  int angle_bins = 32;     // eigenvector angle on [0, pi), d = 2 only
  int spectrum_bins = 32;  // gamma_1 on [0, 1], d = 2 only
  int beta1_bins = 48;
  int beta2_bins = 24;     // used when the prior allows M = 2
  int sub_samples = 4;     // per coefficient axis inside each cell

  long cell_count() const;
};

struct OracleCell {
  int M = 1;
  double angle = 0.0;
  double gamma1 = 1.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
};

/// Normalized weights over grid cells with per-cell posterior-average risk.
class GridPosterior {
 public:
  std::vector<OracleCell> cells;
  std::vector<double> weights;
  std::vector<double> risks;

  double total_weight() const;
  double mean_beta1() const;
  double mean_risk() const;
  double probability_of_dimension(int m) const;
};

/// Normalized Gibbs weights w_k proportional to mass_k exp(-lambda r_k),
/// from log prior masses. Entries with -inf log mass get weight zero.
std::vector<double> gibbs_weights(const std::vector<double>& log_prior_mass, const std::vector<double>& risks,
                                  double lambda);

/// Quadrature of the Gibbs posterior. Throws InvalidParameter when the
/// grid exceeds kMaxOracleCells, d > 2, or the prior allows M > 2.
GridPosterior exact_posterior_oracle(const LabeledDataset& data, const ModelConstants& constants,
                                     const GridSpec& grid);

}  // namespace lrsim
