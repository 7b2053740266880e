#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lrsim/config.hpp"
#include "lrsim/datagen.hpp"
#include "lrsim/prior.hpp"
#include "lrsim/risk.hpp"
#include "lrsim/sampler.hpp"

namespace lrsim {

/// Budgets for the validation suites run by `validate`.
struct ValidateSettings {
  bool inject_bug = false;
  long small_ball_draws = 1'000'000;
  long toy_steps = 2'000'000;
  int pythagoras_pairs = 20;
  int pythagoras_mc = 100'000;
  long oracle_iterations = 40'000;
  long recovery_draws = 20'000;
};

/// Typed view of a configuration file. Every key is documented in README.md.
struct ExperimentConfig {
  std::string subcommand;

  Index d = 3;
  int rank = 1;
  LinkSpec link;
  double C = 1.0;

  NoiseSpec noise{NoiseKind::Gaussian, 0.5};
  double L = 0.5;
  double sigma = 0.5;

  int n = 500;
  std::optional<std::filesystem::path> data_file;

  std::vector<double> alpha;
  double decay_base = 10.0;
  int max_dimension = 0;

  std::optional<double> lambda;
  double lambda_multiplier = 1.0;

  ChainSettings chain;
  int chains = 4;
  std::uint64_t seed = 0;
  int workers = 1;

  int n_mc = 2000;
  /// Cap on the number of draws scored per fit (evenly spaced); 0 = all.
  int scored_draws = 1000;

  std::vector<int> n_grid;
  int replicates = 8;
  std::vector<double> epsilon;

  ValidateSettings validate;

  std::filesystem::path output_dir = "out";

  /// Throws ConfigError on unknown keys, bad values or a missing seed.
  static ExperimentConfig from(const Config& cfg, const std::string& subcommand);

  ModelConstants constants_for(int sample_size) const;
  PriorConfig prior_for(int sample_size) const;
  TruthSpec make_truth_spec() const;
};

}  // namespace lrsim
