#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "wavezar/config.hpp"
#include "wavezar/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"wavezar: damped semilinear waves with Zaremba boundary conditions"};
  std::string subcommand;
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;

  app.add_option("subcommand", subcommand, "simulate|observe|rays|resolvent|truncation|decay|pipeline")
      ->required()
      ->check(CLI::IsMember(wavezar::subcommands()));
  app.add_option("--config", config_path, "experiment config file")->required();
  app.add_option("--out", out_dir, "output directory (overrides output.dir)");
  app.add_option("--seed", seed, "random seed (overrides analysis.seed)");
  CLI11_PARSE(app, argc, argv);

  wavezar::ExperimentConfig config;
  try {
    config = wavezar::parse_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return wavezar::kExitConfig;
  }
  if (out_dir) config.output_dir = *out_dir;
  if (seed) config.seed = *seed;

  const auto outcome = wavezar::run(subcommand, config, config.output_dir);
  if (!outcome.error.empty()) {
    std::cerr << "error: " << outcome.error << "\n";
    return outcome.exit_code;
  }
  for (const auto& a : outcome.artifacts) std::printf("%s/%s %s\n", config.output_dir.c_str(), a.name.c_str(), a.hash.c_str());
  if (outcome.exit_code == wavezar::kExitDecayViolation)
    std::cerr << "error: fitted decay rate is below half the predicted rate\n";
  return outcome.exit_code;
}
