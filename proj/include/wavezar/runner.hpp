#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wavezar/config.hpp"
#include "wavezar/discretization.hpp"
#include "wavezar/gcc_ray.hpp"
#include "wavezar/integrator.hpp"
#include "wavezar/output.hpp"
#include "wavezar/stability.hpp"

namespace wavezar {

/// Everything a subcommand needs, built once from a validated config.
struct Setup {
  ExperimentConfig config;
  Mesh mesh;
  std::shared_ptr<const SparseOperator> laplacian;
  DampingField damping;
  Problem problem;
  double dt = 0.0;
  Eigen::VectorXd u0;
  Eigen::VectorXd v0;
};

Setup prepare(const ExperimentConfig& config);

/// Initial displacement on the dofs (see InitialDataSpec).
Eigen::VectorXd initial_displacement(const Mesh& mesh, const SparseOperator& laplacian, const InitialDataSpec& spec);

RaySampling ray_sampling(const ExperimentConfig& config);

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  /// Artifacts were written but the fitted decay rate is below half the predicted one.
  kExitDecayViolation = 3,
};

struct RunOutcome {
  int exit_code = kExitOk;
  std::vector<ArtifactRecord> artifacts;
  std::vector<std::string> warnings;
  std::string error;
};

const std::vector<std::string>& subcommands();

/// Runs one subcommand and commits its artifacts plus resolved_config.ini and
/// run_manifest.json to `out_dir`.  Nothing is left behind on failure.
RunOutcome run(const std::string& subcommand, const ExperimentConfig& config, const std::filesystem::path& out_dir);

}  // namespace wavezar
