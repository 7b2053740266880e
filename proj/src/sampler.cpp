#include "lrsim/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include "lrsim/errors.hpp"
#include "lrsim/stats.hpp"

namespace lrsim {

std::string to_string(MoveKind kind) {
  switch (kind) {
    case MoveKind::Rotation: return "rotation";
    case MoveKind::Spectrum: return "spectrum";
    case MoveKind::Coefficient: return "coefficient";
    case MoveKind::Dimension: return "dimension";
  }
  return "unknown";
}

GibbsTarget::GibbsTarget(const LabeledDataset& data, const ModelConstants& constants, const PriorConfig& prior)
    : data_(&data), constants_(constants), prior_(prior) {
  prior_.validate();
  if (prior_.d != data.d) throw InvalidDimension("prior and dataset dimensions differ");
  if (data.n() < 1) throw InvalidParameter("dataset is empty");
  if (!(constants_.lambda >= 0.0)) throw InvalidParameter("inverse temperature must be nonnegative");
  alpha_ = prior_.dirichlet_parameters();
}

Vector GibbsTarget::compute_indices(const Matrix& b) const { return index_values(data_->x, b); }

double GibbsTarget::risk_from_indices(const Vector& indices, const Vector& beta) const {
  const Vector& y = data_->y;
  double s = 0.0;
  for (Index i = 0; i < indices.size(); ++i) {
    double t = indices[i];
    if (std::abs(t) > 1.0) {
      if (std::abs(t) > 1.0 + 1e-12) throw DomainError("index <X, B> outside [-1, 1]");
      t = std::clamp(t, -1.0, 1.0);
    }
    const double r = y[i] - eval_expansion(beta.data(), beta.size(), t);
    s += r * r;
  }
  return s / static_cast<double>(indices.size());
}

void GibbsTarget::finish(ChainState& s) const {
  s.prior = log_prior_components(s.gamma.values(), s.beta, prior_);
  if (!s.prior.in_support()) {
    s.log_target = kOutOfSupport;
    return;
  }
  s.risk = risk_from_indices(s.indices, s.beta);
  s.log_target = -constants_.lambda * s.risk + s.prior.total();
}

ChainState GibbsTarget::make_state(OrthogonalFactor v, SpectrumSimplex gamma, Vector beta) const {
  if (v.dim() != prior_.d || gamma.dim() != prior_.d) throw InvalidDimension("state dimension mismatch");
  IndexMatrix b = assemble_index_matrix(v, gamma);
  ChainState s{std::move(v), std::move(gamma), std::move(beta), b.dense(), Vector(), 0.0, {}, kOutOfSupport};
  s.indices = compute_indices(s.B);
  finish(s);
  return s;
}

ChainState GibbsTarget::sample_prior_state(Rng& rng) const {
  OrthogonalFactor v = sample_haar_orthogonal(prior_.d, rng);
  SpectrumSimplex gamma = sample_dirichlet(alpha_, rng);
  const int m = sample_model_dimension(prior_, rng);
  return make_state(std::move(v), std::move(gamma), sample_coefficients_uniform(m, prior_.budget(), rng));
}

ChainState GibbsTarget::with_matrix(const ChainState& from, OrthogonalFactor v, SpectrumSimplex gamma) const {
  IndexMatrix b = assemble_index_matrix(v, gamma);
  ChainState s{std::move(v), std::move(gamma), from.beta, b.dense(), Vector(), 0.0, {}, kOutOfSupport};
  s.indices = compute_indices(s.B);
  finish(s);
  return s;
}

ChainState GibbsTarget::with_coefficients(const ChainState& from, Vector beta) const {
  ChainState s = from;
  s.beta = std::move(beta);
  finish(s);
  return s;
}

double log_gibbs_target(const ChainState& state, const GibbsTarget& target) {
  return target.make_state(state.V, state.gamma, state.beta).log_target;
}

double log_gibbs_target(const ChainState& state, const LabeledDataset& data, const ModelConstants& constants,
                        const PriorConfig& prior) {
  return log_gibbs_target(state, GibbsTarget(data, constants, prior));
}

namespace {

Proposal reject(const ChainState& state) { return Proposal{state, 0.0, true}; }

Proposal propose_rotation(const ChainState& state, double scale, const GibbsTarget& target, Rng& rng) {
  const Index d = state.V.dim();
  Matrix s = Matrix::Zero(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = i + 1; j < d; ++j) {
      const double z = scale * standard_normal(rng);
      s(i, j) = z;
      s(j, i) = -z;
    }
  }
  // Right-multiplying by exp(S) with S and -S equally likely is symmetric
  // with respect to Haar measure.
  Matrix v = state.V.matrix() * skew_exponential(s);
  return Proposal{target.with_matrix(state, OrthogonalFactor(std::move(v), 1e-6), state.gamma), 0.0, false};
}

Proposal propose_spectrum(const ChainState& state, double scale, const GibbsTarget& target, Rng& rng) {
  const Index d = state.gamma.dim();
  if (d == 1) return Proposal{state, 0.0, false};
  const double kappa = 1.0 / scale;
  const auto alpha = target.prior().dirichlet_parameters();
  auto shifted = [&](const Vector& around) {
    std::vector<double> a(static_cast<std::size_t>(d));
    for (Index i = 0; i < d; ++i) a[static_cast<std::size_t>(i)] = kappa * around[i] + alpha[static_cast<std::size_t>(i)];
    return a;
  };
  const auto forward = shifted(state.gamma.values());
  SpectrumSimplex next = sample_dirichlet(forward, rng);
  const auto backward = shifted(next.values());
  const double log_ratio =
      log_dirichlet_density(state.gamma.values(), backward) - log_dirichlet_density(next.values(), forward);
  return Proposal{target.with_matrix(state, state.V, std::move(next)), log_ratio, false};
}

Proposal propose_coefficients(const ChainState& state, double scale, const GibbsTarget& target, Rng& rng) {
  Vector beta = state.beta;
  for (Index j = 0; j < beta.size(); ++j) beta[j] += scale * standard_normal(rng) / static_cast<double>(j + 1);
  if (weighted_l1_norm(beta) > target.prior().budget()) return reject(state);
  return Proposal{target.with_coefficients(state, std::move(beta)), 0.0, false};
}

// Half-width of the birth proposal for a new coefficient appended to `lower`.
double birth_half_width(const Vector& lower, double budget) {
  const double slack = std::max(0.0, budget - weighted_l1_norm(lower));
  return slack / static_cast<double>(lower.size() + 1);
}

}  // namespace

Proposal propose_birth(const ChainState& state, double coefficient, const GibbsTarget& target) {
  if (state.M() >= target.prior().dimension_cap()) return reject(state);
  const double half = birth_half_width(state.beta, target.prior().budget());
  if (!(half > 0.0) || std::abs(coefficient) > half) return reject(state);
  Vector beta(state.beta.size() + 1);
  beta.head(state.beta.size()) = state.beta;
  beta[state.beta.size()] = coefficient;
  // Forward density 1 / (2 half); the matching death is deterministic.
  return Proposal{target.with_coefficients(state, std::move(beta)), std::log(2.0 * half), false};
}

Proposal propose_death(const ChainState& state, const GibbsTarget& target) {
  if (state.M() <= 1) return reject(state);
  Vector lower = state.beta.head(state.beta.size() - 1);
  const double half = birth_half_width(lower, target.prior().budget());
  if (!(half > 0.0) || std::abs(state.beta[state.beta.size() - 1]) > half) return reject(state);
  return Proposal{target.with_coefficients(state, std::move(lower)), -std::log(2.0 * half), false};
}

Proposal propose_move(const ChainState& state, MoveKind kind, const StepSizes& steps, const GibbsTarget& target,
                      Rng& rng) {
  switch (kind) {
    case MoveKind::Rotation:
      return propose_rotation(state, steps.rotation, target, rng);
    case MoveKind::Spectrum:
      return propose_spectrum(state, steps.spectrum, target, rng);
    case MoveKind::Coefficient:
      return propose_coefficients(state, steps.coefficient, target, rng);
    case MoveKind::Dimension: {
      if (uniform01(rng) < 0.5) {
        const double half = birth_half_width(state.beta, target.prior().budget());
        const double b = (2.0 * uniform01(rng) - 1.0) * half;
        return propose_birth(state, b, target);
      }
      return propose_death(state, target);
    }
  }
  throw std::logic_error("unknown move kind");
}

double log_acceptance_ratio(const ChainState& state, const Proposal& proposal) {
  if (proposal.rejected || !proposal.candidate.in_support()) return kOutOfSupport;
  return proposal.candidate.log_target - state.log_target + proposal.log_proposal_ratio;
}

bool metropolis_accept(double log_target_current, double log_target_candidate, double log_proposal_ratio,
                       const MhOptions& options, Rng& rng) {
  if (log_target_candidate == kOutOfSupport) return false;
  double diff = log_target_candidate - log_target_current;
  if (options.inject_sign_bug) diff = -diff;
  const double log_alpha = diff + log_proposal_ratio;
  if (log_alpha >= 0.0) return true;
  return std::log(uniform01(rng)) < log_alpha;
}

double MoveStats::acceptance_rate(MoveKind kind) const {
  const auto k = static_cast<std::size_t>(kind);
  return proposals[k] == 0 ? 0.0 : static_cast<double>(acceptances[k]) / static_cast<double>(proposals[k]);
}

void MoveStats::merge(const MoveStats& other) {
  for (int k = 0; k < kMoveKinds; ++k) {
    proposals[static_cast<std::size_t>(k)] += other.proposals[static_cast<std::size_t>(k)];
    acceptances[static_cast<std::size_t>(k)] += other.acceptances[static_cast<std::size_t>(k)];
  }
}

bool mh_step(ChainState& state, const GibbsTarget& target, MoveKind kind, const StepSizes& steps,
             const MhOptions& options, MoveStats& stats, Rng& rng) {
  const auto k = static_cast<std::size_t>(kind);
  ++stats.proposals[k];
  Proposal p = propose_move(state, kind, steps, target, rng);
  if (p.rejected) return false;
  if (!metropolis_accept(state.log_target, p.candidate.log_target, p.log_proposal_ratio, options, rng)) return false;
  state = std::move(p.candidate);
  ++stats.acceptances[k];
  return true;
}

void ChainSettings::validate() const {
  const long burn = effective_burn_in();
  if (iterations <= burn || burn < 0) throw InvalidParameter("iterations must exceed burn-in");
  if (thin < 1) throw InvalidParameter("thin must be at least 1");
  if (schedule.dimension_every < 0) throw InvalidParameter("dimension_every must be nonnegative");
  const auto& s = schedule.initial_steps;
  if (!(s.rotation >= 0.0 && s.spectrum > 0.0 && s.coefficient > 0.0)) {
    throw InvalidParameter("step sizes must be positive");
  }
}

namespace {

struct TuneRange {
  double lo, hi;
};

constexpr std::array<TuneRange, 3> kTuneRanges{{{1e-4, std::numbers::pi}, {1e-5, 1e3}, {1e-6, 1e2}}};
constexpr long kTuneWindow = 50;

double& step_ref(StepSizes& s, MoveKind kind) {
  switch (kind) {
    case MoveKind::Rotation: return s.rotation;
    case MoveKind::Spectrum: return s.spectrum;
    default: return s.coefficient;
  }
}

// Nudges step sizes toward 25-40% acceptance over fixed windows. Dimension
// moves have no scale and are left alone.
void tune(StepSizes& steps, const MoveStats& window, MoveStats& window_reset, MoveKind kind) {
  const auto k = static_cast<std::size_t>(kind);
  if (kind == MoveKind::Dimension || window.proposals[k] < kTuneWindow) return;
  const double rate = window.acceptance_rate(kind);
  double& s = step_ref(steps, kind);
  if (rate > 0.40) s *= 1.5;
  if (rate < 0.25) s /= 1.5;
  s = std::clamp(s, kTuneRanges[k].lo, kTuneRanges[k].hi);
  window_reset.proposals[k] = 0;
  window_reset.acceptances[k] = 0;
}

PosteriorDraw snapshot(const ChainState& s, std::uint64_t seed, long iteration) {
  return PosteriorDraw{seed, iteration, s.beta, s.gamma.values(), s.B, s.risk};
}

}  // namespace

ChainResult run_chain(const GibbsTarget& target, const ChainSettings& settings, std::uint64_t seed) {
  settings.validate();
  const long burn = settings.effective_burn_in();
  Rng rng(seed);
  ChainResult result;
  result.seed = seed;
  StepSizes steps = settings.schedule.initial_steps;
  ChainState state = target.sample_prior_state(rng);
  MoveStats window;
  result.draws.reserve(static_cast<std::size_t>((settings.iterations - burn) / settings.thin));
  constexpr std::array<MoveKind, 3> cycle{MoveKind::Rotation, MoveKind::Spectrum, MoveKind::Coefficient};
  long cycle_pos = 0;
  for (long t = 0; t < settings.iterations; ++t) {
    const int every = settings.schedule.dimension_every;
    MoveKind kind;
    if (every > 0 && (t + 1) % every == 0) {
      kind = MoveKind::Dimension;
    } else {
      kind = cycle[static_cast<std::size_t>(cycle_pos % 3)];
      ++cycle_pos;
    }
    MoveStats& stats = t < burn ? window : result.stats;
    mh_step(state, target, kind, steps, settings.schedule.options, stats, rng);
    if (t < burn && settings.schedule.tune_during_burn_in) tune(steps, window, window, kind);

    if ((t + 1) % kRevalidateEvery == 0) {
      OrthogonalFactor v(reorthonormalize(state.V.matrix()), 1e-6);
      ChainState fresh = target.make_state(std::move(v), state.gamma, state.beta);
      result.max_cache_drift = std::max(result.max_cache_drift, std::abs(fresh.risk - state.risk));
      state = std::move(fresh);
    }
    if (t >= burn && (t - burn + 1) % settings.thin == 0) result.draws.push_back(snapshot(state, seed, t));
  }
  result.tuned_steps = steps;
  return result;
}

std::vector<PosteriorDraw> MultiChainResult::pooled_draws() const {
  std::vector<PosteriorDraw> out;
  for (const auto& c : chains) out.insert(out.end(), c.draws.begin(), c.draws.end());
  return out;
}

MultiChainResult run_chains(const GibbsTarget& target, const ChainSettings& settings, int count,
                            std::uint64_t master_seed, int workers) {
  if (count < 1) throw InvalidParameter("need at least one chain");
  settings.validate();
  MultiChainResult out;
  out.chains.resize(static_cast<std::size_t>(count));
  std::atomic<int> next{0};
  auto work = [&] {
    for (int k = next++; k < count; k = next++) {
      out.chains[static_cast<std::size_t>(k)] =
          run_chain(target, settings, derive_seed(master_seed, static_cast<std::uint64_t>(k)));
    }
  };
  const int threads = std::clamp(workers, 1, count);
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(work);
  }
  std::vector<std::vector<double>> traces;
  for (const auto& c : out.chains) {
    out.stats.merge(c.stats);
    std::vector<double> trace;
    for (const auto& d : c.draws) trace.push_back(d.risk);
    traces.push_back(std::move(trace));
  }
  out.psrf = potential_scale_reduction(traces);
  return out;
}

const PosteriorDraw& draw_estimator(const std::vector<PosteriorDraw>& draws, Rng& rng) {
  if (draws.empty()) throw InvalidParameter("no posterior draws to select from");
  std::uniform_int_distribution<std::size_t> pick(0, draws.size() - 1);
  return draws[pick(rng)];
}

}  // namespace lrsim
