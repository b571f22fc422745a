#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wavezar/discretization.hpp"
#include "wavezar/integrator.hpp"

namespace wavezar {

/// E(0) / D(T).  nullopt is the "unobservable at this horizon" sentinel
/// (no dissipation by time T).  Throws std::invalid_argument when E(0) = 0 or
/// the trajectory does not reach T.
std::optional<double> observability_ratio(const Trajectory& trajectory, double horizon);

/// Same ratio with the observation accumulator (weight b instead of a).
std::optional<double> observation_ratio(const Trajectory& trajectory, double horizon);

/// Random velocity-only initial data v0 = sum_{m <= modes} xi_m phi_m with
/// xi_m ~ N(0, 1) from a generator seeded by (seed, member), scaled so the
/// energy |v0|_M^2 / 2 is 1.  phi_m are the lowest eigenvectors of -L.
Eigen::VectorXd random_unit_velocity(const LaplacianModes& modes, const Eigen::VectorXd& mass, std::uint64_t seed,
                                     std::size_t member);

struct EnsembleSettings {
  std::size_t members = 20;
  double horizon = 2.0;
  std::uint64_t seed = 42;
  std::size_t modes = 8;
  double dt = 0.0;
  std::size_t stride = 10;
  /// Multiplies every initial datum (1 = unit energy).
  double scale = 1.0;
};

struct ObservabilityReport {
  double horizon = 0.0;
  std::size_t members = 0;
  std::uint64_t seed = 0;
  std::size_t modes = 0;
  /// Per-member ratios; nullopt entries are unobservable members.
  std::vector<std::optional<double>> linear_ratios;
  std::vector<std::optional<double>> semilinear_ratios;
  std::optional<double> c_linear;
  std::optional<double> c_semilinear;
  /// Max over both modes; nullopt when any member is unobservable.
  std::optional<double> c_estimate;
};

/// Runs the ensemble in linear mode (f = 0) and, when the problem carries a
/// nonlinearity, in semilinear mode.  Members run in parallel; results do not
/// depend on scheduling.  Throws BlowUpError when a member blows up.
ObservabilityReport estimate_obs_constant(const Problem& problem, const EnsembleSettings& settings);

struct DecayEstimate {
  double c_obs = 0.0;
  /// 1 / c_obs.
  double c_hat = 0.0;
  double t0 = 0.0;
  double lambda_predicted = 0.0;
  std::optional<double> lambda_fitted;
  std::optional<double> r_squared;
  double fit_start = 0.0;
  double fit_end = 0.0;
};

/// lambda0 = ln(1 + 1/c_obs) / t0.  Throws for nonpositive inputs.
DecayEstimate decay_prediction(double c_obs, double t0);

struct DecayFit {
  double lambda = 0.0;
  double r_squared = 0.0;
  std::size_t samples = 0;
};

/// Least-squares line through (t, ln E) on [start, end].  Throws with fewer
/// than 4 samples in the window or a nonpositive energy inside it.
DecayFit fit_decay(const std::vector<double>& times, const std::vector<double>& energies, double start, double end);

enum class ResolventVerdict { Bounded, Diverging };

struct ResolventScan {
  std::vector<double> mu;
  std::vector<double> norms;
  double sup = 0.0;
  double argmax = 0.0;
  ResolventVerdict verdict = ResolventVerdict::Bounded;
  /// Peak location when diverging (the refined argmax).
  std::optional<double> mu_star;
  /// Largest norm seen during local refinement around the argmax.
  double refined_sup = 0.0;
};

inline constexpr double kResolventBlowup = 1e6;

/// ||(A - i mu I)^{-1}||_2 = 1 / sigma_min(A - i mu I) by dense SVD.
double resolvent_norm(const Eigen::MatrixXd& generator, double mu);

/// Scans n_points equispaced mu in [mu_min, mu_max].  Diverging when the sup
/// exceeds 1e6, or when zooming in around the argmax raises the peak tenfold.
/// Throws std::length_error above the dense dof cap.
ResolventScan resolvent_scan(const BlockGenerator& generator, double mu_min, double mu_max, std::size_t n_points);

struct TruncationPair {
  int k_low = 0;
  int k_high = 0;
  /// max over records of sqrt(|dv|_M^2 + <du, K du>).
  double difference = 0.0;
};

struct TruncationStudy {
  std::vector<int> levels;
  std::vector<double> max_amplitude;
  std::vector<TruncationPair> pairs;
};

/// Runs one trajectory per level from the same data on the same grid and
/// compares consecutive levels.  Levels must ascend.
TruncationStudy truncation_study(const Problem& problem, const NonlinearitySpec& base, const std::vector<int>& levels,
                                 const Eigen::VectorXd& u0, const Eigen::VectorXd& v0, const SimulationOptions& options);

struct HarauxReport {
  DecayFit damped_fit;
  double fit_start = 0.0;
  double fit_end = 0.0;
  bool decay_observed = false;
  /// E(0) / D(T) on the damped run.
  std::optional<double> damped_ratio;
  /// E(0) / int_0^T int_omega |y_t|^2 on the undamped run.
  std::optional<double> undamped_ratio;
  double horizon = 0.0;
  bool observable = false;
  /// decay_observed == observable.
  bool equivalent = false;
};

/// Linear mode only: the problem's nonlinearity is ignored.  `indicator` is the
/// region indicator on the dofs used as observation weight on the undamped run.
HarauxReport haraux_equivalence_experiment(const Problem& problem, const Eigen::VectorXd& indicator,
                                           const Eigen::VectorXd& u0, const Eigen::VectorXd& v0,
                                           const SimulationOptions& options, double horizon, double fit_start,
                                           double fit_end);

std::string to_string(ResolventVerdict verdict);

}  // namespace wavezar
