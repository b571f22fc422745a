#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wavezar/discretization.hpp"
#include "wavezar/geometry.hpp"
#include "wavezar/nonlinearity.hpp"

namespace wavezar {

/// Leapfrog state on the reduced dofs.  `u` is the displacement at time `t`;
/// `v` is the staggered velocity (u(t) - u(t - dt)) / dt, i.e. the velocity at
/// t - dt/2.  Use stagger() to build one from initial data (u0, v0).
struct WaveState {
  Eigen::VectorXd u;
  Eigen::VectorXd v;
  double t = 0.0;
};

struct EnergyRecord {
  double t = 0.0;
  double kinetic = 0.0;
  double potential = 0.0;
  double nonlinear = 0.0;
  double total = 0.0;
  /// kinetic + potential.
  double linear = 0.0;
};

class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(double time, const std::string& what) : std::runtime_error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

/// The damped semilinear system on a fixed discretization.
struct Problem {
  std::shared_ptr<const SparseOperator> laplacian;
  Eigen::VectorXd damping;  // per dof
  std::optional<TruncatedNonlinearity> nonlinearity;
};

Problem make_problem(const SparseOperator& laplacian, const DampingField& damping,
                     std::optional<TruncatedNonlinearity> nonlinearity);

/// safety * h_min / sqrt(dimension); warns when safety > 1.
double cfl_dt(const Mesh& mesh, double safety = 0.9);

/// One leapfrog step with Crank-Nicolson damping:
///   (1 + a dt/2) v+ = (1 - a dt/2) v- + dt (L u - f(u)),   u+ = u + dt v+.
/// Throws BlowUpError when the new state is not finite.
WaveState step(const WaveState& state, double dt, const SparseOperator& lap, const Eigen::VectorXd& damping,
               const TruncatedNonlinearity* nonlinearity);

/// Converts initial data (u0, v0) at t = 0 into a staggered state.
WaveState stagger(const Eigen::VectorXd& u0, const Eigen::VectorXd& v0, double dt, const Problem& problem);

/// Nodal energy of (u, v): trapezoid quadrature, edge-difference gradients.
EnergyRecord energy(const WaveState& state, const SparseOperator& lap, const TruncatedNonlinearity* nonlinearity);

struct SimulationOptions {
  double dt = 0.0;
  double t_final = 0.0;
  std::size_t stride = 10;
  /// Store (u, centered v) at every record.
  bool keep_states = false;
  /// Optional weight b(x) (per dof) for a second accumulator int int b |u_t|^2.
  std::optional<Eigen::VectorXd> observation_weight;
};

/// Records are taken every `stride` steps and at the final step.
///
/// Energies are the scheme's compatible energies: the half-step energy
///   E(n+1/2) = |v(n+1/2)|_M^2 / 2 + <u(n+1), K u(n)> / 2 + sum_M (F(u(n+1)) + F(u(n))) / 2
/// averaged onto integer times.  With f = 0 the identity E(t) + D(t) = E(0)
/// then holds to rounding; with f != 0 the defect is O(dt^2).
struct Trajectory {
  double dt = 0.0;
  std::size_t stride = 0;
  std::vector<EnergyRecord> energy;
  /// D(t) = int_0^t int a |u_t|^2 at each record.
  std::vector<double> dissipated;
  /// Same with the observation weight (empty when none was given).
  std::vector<double> observed;
  /// (u, v) at each record with the centered velocity (only with keep_states).
  std::vector<WaveState> states;
  /// max |u| over all steps.
  double max_amplitude = 0.0;

  std::vector<double> times() const;
  std::vector<double> totals() const;
  /// Linear interpolation of D at time t (t within the recorded range).
  double dissipated_at(double t) const;
  double observed_at(double t) const;
};

Trajectory simulate(const Problem& problem, const Eigen::VectorXd& u0, const Eigen::VectorXd& v0,
                    const SimulationOptions& options);

struct IdentityResidual {
  std::vector<double> residual;
  double max = 0.0;
};

/// |E(t) + D(t) - E(0)| / max(E(0), eps) per record.
IdentityResidual energy_identity_residual(const Trajectory& trajectory);

}  // namespace wavezar
