#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wavezar/geometry.hpp"
#include "wavezar/nonlinearity.hpp"

namespace wavezar {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class InitialKind { Zero, Mode, Beam };

/// Initial displacement; the initial velocity is zero.
///   mode: amplitude * prod_axis shape(wavenumber * pi * (x - lo) / L), shape in {sin, cos}
///   beam: amplitude * exp(-((x - center) / width)^2) * sin(wavenumber_y * pi * (y - lo) / L)
struct InitialDataSpec {
  InitialKind kind = InitialKind::Mode;
  double amplitude = 1.0;
  std::array<std::string, 2> shape{"sin", "sin"};
  std::array<double, 2> wavenumber{1.0, 1.0};
  double center = 0.2;
  double width = 0.08;
};

struct ExperimentConfig {
  DomainSpec domain;
  std::vector<int> nodes;

  DampingSpec damping;
  bool require_assumption = true;

  std::string nonlinearity = "zero";
  double p = 3.0;
  std::optional<int> truncation_level;
  AdmissibilityMode admissibility = AdmissibilityMode::Existence;
  /// Space dimension used for the exponent-range check (defaults to the domain's).
  std::optional<int> admissibility_dimension;

  double t_final = 10.0;
  std::optional<double> dt;  // nullopt: CFL
  double safety = 0.9;
  std::size_t stride = 10;

  InitialDataSpec initial;

  std::size_t ensemble = 20;
  std::uint64_t seed = 42;
  std::size_t modes = 8;
  double horizon = 2.0;
  double mu_min = 0.0;
  double mu_max = 50.0;
  std::size_t mu_points = 400;
  std::vector<int> k_list{1, 2, 4, 8, 16};
  std::optional<double> fit_start;  // nullopt: the GCC control time
  std::optional<double> fit_end;    // nullopt: t_final
  int ray_origins = 32;
  int ray_directions = 64;
  double ray_t_max = 20.0;

  std::string output_dir = "out";

  NonlinearitySpec nonlinearity_spec() const;
  std::optional<TruncatedNonlinearity> truncated_nonlinearity() const;
  int effective_admissibility_dimension() const {
    return admissibility_dimension.value_or(domain.dimension);
  }
};

/// Parses the sectioned key-value format and validates it (see
/// docs/config-format.md).  Throws ConfigError naming the offending key or the
/// module precondition that failed.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config(const std::string& path);

/// Cross-module validation; parse_config_text calls this.
void validate_config(const ExperimentConfig& config);

/// Canonical text of a config with every default filled in.  Parsing the
/// output reproduces the same config.  The output directory is not included.
std::string render_config(const ExperimentConfig& config);

}  // namespace wavezar
