#pragma once

// Empirical and Monte-Carlo risks, and the inverse-temperature schedule.

#include <cstdint>
#include <functional>
#include <string>

#include "lrsim/datagen.hpp"

namespace lrsim {

struct ModelConstants {
  double C = 1.0;
  double L = 1.0;
  double sigma = 1.0;
  double c_phi = std::numbers::pi;
  int n = 1;
  double w = 0.0;       // 64 (C+1) max(L, C+1)
  double c1 = 0.0;      // 8 ((C+1)^2 + sigma^2)
  double lambda = 0.0;  // n / (w + 2 c1)

  /// Same constants with the inverse temperature replaced.
  ModelConstants with_lambda(double value) const;
};

ModelConstants lambda_schedule(double C, double L, double sigma, int n, double c_phi = std::numbers::pi);

/// (1/n) sum_i (Y_i - f(<X_i, B>))^2. Throws DomainError when an index
/// leaves [-1, 1].
double empirical_risk(const LabeledDataset& data, const IndexMatrix& b, const LinkFunction& f);

using DesignSampler = std::function<Matrix(Rng&)>;

/// The design law of sample_design_matrix for side d.
DesignSampler default_design_sampler(Index d);

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  int n_mc = 0;
};

/// Monte-Carlo E[(f(<X,B>) - f*(<X,B*>))^2] over fresh design draws.
McEstimate excess_risk_mc(const IndexMatrix& b, const LinkFunction& f, const TruthSpec& truth,
                          const DesignSampler& x_sampler, int n_mc, Rng& rng);

/// A frozen design sample with truth values, for scoring many candidates
/// with common random numbers.
class EvaluationSet {
 public:
  EvaluationSet(const TruthSpec& truth, const DesignSampler& x_sampler, int n_mc, Rng& rng);

  McEstimate excess_risk(const Matrix& b, const Vector& beta) const;
  int size() const { return static_cast<int>(truth_values_.size()); }

 private:
  Matrix flat_;
  Vector truth_values_;
};

struct PythagorasResult {
  double discrepancy = 0.0;  // |MC[(Y-f)^2 - (Y-f*)^2] - MC[(f-f*)^2]|
  double std_error = 0.0;
  double excess = 0.0;       // MC[(f-f*)^2]
  int n_mc = 0;
};

/// Checks R(B,f) - R(B*,f*) = E(f - f*)^2 on shared draws of (X, eps).
PythagorasResult pythagoras_check(const IndexMatrix& b, const LinkFunction& f, const TruthSpec& truth,
                                  const DesignSampler& x_sampler, const NoiseSpec& noise, int n_mc, Rng& rng);

struct RiskReport {
  int n = 0;
  Index d = 0;
  int M = 0;
  double lambda = 0.0;
  double empirical_risk = 0.0;
  double excess_risk_estimate = 0.0;
  double excess_risk_mc_stderr = 0.0;
  int n_mc = 0;
  std::uint64_t seed = 0;

  static std::string csv_header();
  std::string csv_row() const;
};

}  // namespace lrsim
