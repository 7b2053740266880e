#pragma once

// Subcommands of the lrsim CLI. Each writes its artifacts into `out` and
// is a pure function of the configuration (including its seed).

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lrsim/experiment_config.hpp"
#include "lrsim/study.hpp"
#include "lrsim/validate.hpp"

namespace lrsim {

/// Environment variable overriding every other output-directory setting.
inline constexpr const char* kOutputEnv = "LRSIM_OUTPUT_DIR";

/// LRSIM_OUTPUT_DIR, then --out, then output.dir.
std::filesystem::path resolve_output_dir(const ExperimentConfig& cfg,
                                         const std::optional<std::filesystem::path>& cli_out);

struct FitOutcome {
  RiskReport report;
  double posterior_mean_excess = 0.0;  // NaN without a known truth
  double psrf = 1.0;
  MoveStats stats;
  double max_cache_drift = 0.0;
  std::size_t draws = 0;
};

/// Synthetic dataset implied by the truth.* / noise.* / data.n keys.
LabeledDataset synthetic_dataset(const ExperimentConfig& cfg);

FitOutcome cmd_fit(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log);
LabeledDataset cmd_gen_data(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log);
RateCurve cmd_rate(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log);
ContractionTable cmd_contract(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log);
std::vector<SuiteResult> cmd_validate(const ExperimentConfig& cfg, const std::filesystem::path& out,
                                      std::ostream& log);

/// Loads the config, dispatches, and maps errors to exit codes:
/// 0 ok, 1 suite failure, 2 usage or configuration error.
int run_command(const std::string& subcommand, const std::filesystem::path& config_path,
                const std::optional<std::filesystem::path>& cli_out, std::ostream& log, std::ostream& err);

}  // namespace lrsim
