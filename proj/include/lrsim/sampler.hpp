#pragma once

// Metropolis-Hastings engine for the Gibbs posterior
//   d rho / d pi (B, f)  proportional to  exp(-lambda r_n(B, f)),
// parameterized by (V, gamma) for B and (M, beta) for f.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "lrsim/datagen.hpp"
#include "lrsim/prior.hpp"
#include "lrsim/risk.hpp"

namespace lrsim {

enum class MoveKind { Rotation = 0, Spectrum = 1, Coefficient = 2, Dimension = 3 };
inline constexpr int kMoveKinds = 4;

std::string to_string(MoveKind kind);

struct ChainState {
  OrthogonalFactor V;
  SpectrumSimplex gamma;
  Vector beta;
  Matrix B;
  Vector indices;  // <X_i, B>
  double risk = 0.0;
  LogPriorComponents prior;
  double log_target = kOutOfSupport;

  int M() const { return static_cast<int>(beta.size()); }
  bool in_support() const { return log_target != kOutOfSupport; }
};

/// The tempered target bound to one dataset.
class GibbsTarget {
 public:
  GibbsTarget(const LabeledDataset& data, const ModelConstants& constants, const PriorConfig& prior);

  const LabeledDataset& data() const { return *data_; }
  const ModelConstants& constants() const { return constants_; }
  const PriorConfig& prior() const { return prior_; }
  double lambda() const { return constants_.lambda; }

  /// Builds a state with every cache computed from scratch.
  ChainState make_state(OrthogonalFactor v, SpectrumSimplex gamma, Vector beta) const;

  /// Draws a starting state from the prior.
  ChainState sample_prior_state(Rng& rng) const;

  /// Candidate with a new B; recomputes indices and risk.
  ChainState with_matrix(const ChainState& from, OrthogonalFactor v, SpectrumSimplex gamma) const;
  /// Candidate with new coefficients; reuses cached indices.
  ChainState with_coefficients(const ChainState& from, Vector beta) const;

  double risk_from_indices(const Vector& indices, const Vector& beta) const;
  Vector compute_indices(const Matrix& b) const;

 private:
  void finish(ChainState& s) const;

  const LabeledDataset* data_;
  ModelConstants constants_;
  PriorConfig prior_;
  std::vector<double> alpha_;
};

/// -lambda r_n + log prior (Haar factor omitted), recomputed from (V, gamma, beta).
double log_gibbs_target(const ChainState& state, const GibbsTarget& target);
double log_gibbs_target(const ChainState& state, const LabeledDataset& data, const ModelConstants& constants,
                        const PriorConfig& prior);

struct StepSizes {
  double rotation = 0.3;     // std of the skew generator entries
  double spectrum = 0.02;    // 1 / kappa of the Dirichlet proposal
  double coefficient = 0.2;  // random-walk scale for z_j = j beta_j
};

struct Proposal {
  ChainState candidate;
  double log_proposal_ratio = 0.0;  // log q(current | candidate) - log q(candidate | current)
  bool rejected = false;            // outside the support; never evaluated
};

Proposal propose_move(const ChainState& state, MoveKind kind, const StepSizes& steps, const GibbsTarget& target,
                      Rng& rng);

/// Birth M -> M + 1 appending `coefficient`, and the matching death. The
/// birth draws the new coefficient uniformly on [-s/(M+1), s/(M+1)], where s is
/// the unused weighted-l1 budget of the lower-dimensional state.
Proposal propose_birth(const ChainState& state, double coefficient, const GibbsTarget& target);
Proposal propose_death(const ChainState& state, const GibbsTarget& target);

/// log alpha = log_target(candidate) - log_target(state) + log_proposal_ratio.
double log_acceptance_ratio(const ChainState& state, const Proposal& proposal);

struct MhOptions {
  /// Negative control: flips the sign of the target difference in the
  /// acceptance ratio.
  bool inject_sign_bug = false;
};

/// Metropolis rule in log space. Out-of-support candidates are always refused.
bool metropolis_accept(double log_target_current, double log_target_candidate, double log_proposal_ratio,
                       const MhOptions& options, Rng& rng);

struct MoveStats {
  std::array<long, kMoveKinds> proposals{};
  std::array<long, kMoveKinds> acceptances{};

  double acceptance_rate(MoveKind kind) const;
  void merge(const MoveStats& other);
};

/// One proposal of `kind` followed by accept/reject. Returns true on accept.
bool mh_step(ChainState& state, const GibbsTarget& target, MoveKind kind, const StepSizes& steps,
             const MhOptions& options, MoveStats& stats, Rng& rng);

struct MoveSchedule {
  /// Every `dimension_every`-th iteration makes a dimension move; the rest
  /// cycle rotation, spectrum, coefficient. 0 disables dimension moves.
  int dimension_every = 5;
  StepSizes initial_steps;
  bool tune_during_burn_in = true;
  MhOptions options;
};

struct ChainSettings {
  long iterations = 10000;
  long burn_in = -1;  // -1: 20% of iterations
  long thin = 10;
  MoveSchedule schedule;

  long effective_burn_in() const { return burn_in < 0 ? iterations / 5 : burn_in; }
  void validate() const;
};

struct PosteriorDraw {
  std::uint64_t seed = 0;
  long iteration = 0;
  Vector beta;
  Vector gamma;
  Matrix B;
  double risk = 0.0;

  int M() const { return static_cast<int>(beta.size()); }
};

struct ChainResult {
  std::vector<PosteriorDraw> draws;
  MoveStats stats;
  StepSizes tuned_steps;
  double max_cache_drift = 0.0;  // largest |cached r_n - recomputed r_n|
  std::uint64_t seed = 0;
};

inline constexpr long kRevalidateEvery = 1000;

/// Runs one chain from a prior draw. Deterministic given the seed; keeps
/// floor((iterations - burn_in) / thin) draws.
ChainResult run_chain(const GibbsTarget& target, const ChainSettings& settings, std::uint64_t seed);

struct MultiChainResult {
  std::vector<ChainResult> chains;
  MoveStats stats;
  double psrf = 1.0;  // potential scale reduction of the r_n traces

  std::vector<PosteriorDraw> pooled_draws() const;
};

/// `count` chains seeded derive_seed(master_seed, k), spread over `workers`
/// threads. Output order is chain order regardless of scheduling.
MultiChainResult run_chains(const GibbsTarget& target, const ChainSettings& settings, int count,
                            std::uint64_t master_seed, int workers = 1);

/// The estimator: one uniformly selected posterior draw.
const PosteriorDraw& draw_estimator(const std::vector<PosteriorDraw>& draws, Rng& rng);

}  // namespace lrsim
