#pragma once

// Replicated fits across a grid of sample sizes, shared by the rate and
// contraction experiments.

#include <cstdint>
#include <vector>

#include "lrsim/experiment_config.hpp"
#include "lrsim/stats.hpp"

namespace lrsim {

struct ReplicateResult {
  int n = 0;
  int replicate = 0;
  std::uint64_t data_seed = 0;
  double lambda = 0.0;
  /// Excess risk of every scored posterior draw (common evaluation set).
  std::vector<double> draw_excess;
  double posterior_mean_excess = 0.0;
  /// Excess risk of the single-draw estimator.
  double single_draw_excess = 0.0;
  double psrf = 1.0;
  double mean_M = 0.0;
};

struct StudyResult {
  TruthSpec truth;
  std::vector<int> n_grid;
  /// replicates[g][r]
  std::vector<std::vector<ReplicateResult>> replicates;
};

/// Seed of the dataset for grid point g, replicate r.
std::uint64_t study_data_seed(std::uint64_t seed, int g, int r);

/// One fit: generate data, run the chains, score draws on `eval`.
ReplicateResult run_replicate(const ExperimentConfig& cfg, const TruthSpec& truth, const EvaluationSet& eval,
                              int n, int g, int r);

/// All (n, replicate) fits, spread over cfg.workers threads; the result does
/// not depend on the worker count.
StudyResult run_study(const ExperimentConfig& cfg);

struct RatePoint {
  int n = 0;
  double lambda = 0.0;
  double mean_excess = 0.0;  // replicate average of the posterior-mean excess
  double stderr_excess = 0.0;
  double single_mean = 0.0;  // same for the single-draw estimator
  double single_stderr = 0.0;
  double q90 = 0.0;          // 90% posterior quantile, replicate average
  double q90_stderr = 0.0;
};

struct RateCurve {
  std::vector<RatePoint> points;
  SlopeFit fit;
  bool decreasing = false;  // mean_{i+1} <= mean_i + 2 combined stderr
};

RateCurve summarize_rate(const StudyResult& study);

struct ContractionRow {
  int n = 0;
  double epsilon = 0.0;
  double threshold = 0.0;  // tau_n
  double mass_below = 0.0; // replicate mean of rho(excess <= tau_n)
  double bound = 0.0;      // 1 - epsilon
  double bound_satisfied_frac = 0.0;
  double q90 = 0.0;
  double q90_stderr = 0.0;
};

struct ContractionTable {
  std::vector<ContractionRow> rows;
  double scale = 0.0;            // calibrated constant multiplying the rate shape
  bool quantiles_shrink = false; // q90 strictly decreasing beyond 3 combined stderr
};

/// Rate shape (log(Cn)/n)^{2k/(2k+1)} + (r d log 16n + d log d log 2en + log 2/eps) / n.
double contraction_shape(int n, double epsilon, double C, double k, int rank, Index d);

/// Default epsilon_n = 1 / log n when `epsilon` is empty; otherwise one entry
/// per grid point, or a single entry for all.
ContractionTable summarize_contraction(const StudyResult& study, const ExperimentConfig& cfg);

std::string rate_csv(const RateCurve& curve);
std::string contraction_csv(const ContractionTable& table);

}  // namespace lrsim
