#include <iostream>
#include <optional>
#include <string>
#include <utility>

#include <CLI11.hpp>

#include "lrsim/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Gibbs-posterior sampler for low-rank matrix single index models"};
  app.require_subcommand(1);

  std::string config;
  std::string out;
  const std::pair<const char*, const char*> commands[] = {
      {"fit", "sample the posterior for one dataset and score the estimator"},
      {"rate", "excess risk against n over replicated datasets"},
      {"contract", "posterior excess-risk quantiles against n"},
      {"validate", "run the sampler and prior self-checks"},
      {"gen-data", "write a synthetic dataset"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "configuration file")->required();
    sub->add_option("--out", out, "output directory");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  std::optional<std::filesystem::path> cli_out;
  if (!out.empty()) cli_out = out;
  const std::string subcommand = app.get_subcommands().front()->get_name();
  return lrsim::run_command(subcommand, config, cli_out, std::cout, std::cerr);
}
