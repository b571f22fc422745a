#include "wavezar/stability.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "wavezar/support.hpp"

namespace wavezar {

namespace {

std::optional<double> ratio_of(double e0, double accumulated) {
  if (!(e0 > 0.0)) throw std::invalid_argument("observability_ratio: initial energy is zero");
  if (!(accumulated > 0.0)) return std::nullopt;
  return e0 / accumulated;
}

Problem linear_copy(const Problem& problem) {
  Problem p = problem;
  p.nonlinearity.reset();
  return p;
}

std::optional<double> max_ratio(const std::vector<std::optional<double>>& ratios) {
  std::optional<double> out;
  for (const auto& r : ratios) {
    if (!r) return std::nullopt;
    out = out ? std::max(*out, *r) : *r;
  }
  return out;
}

}  // namespace

std::string to_string(ResolventVerdict verdict) {
  return verdict == ResolventVerdict::Bounded ? "bounded" : "diverging";
}

std::optional<double> observability_ratio(const Trajectory& trajectory, double horizon) {
  if (trajectory.energy.empty()) throw std::invalid_argument("observability_ratio: empty trajectory");
  return ratio_of(trajectory.energy.front().total, trajectory.dissipated_at(horizon));
}

std::optional<double> observation_ratio(const Trajectory& trajectory, double horizon) {
  if (trajectory.energy.empty()) throw std::invalid_argument("observation_ratio: empty trajectory");
  return ratio_of(trajectory.energy.front().total, trajectory.observed_at(horizon));
}

Eigen::VectorXd random_unit_velocity(const LaplacianModes& modes, const Eigen::VectorXd& mass, std::uint64_t seed,
                                     std::size_t member) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(member & 0xffffffffu), static_cast<std::uint32_t>(member >> 32)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(modes.vectors.rows());
  for (Eigen::Index m = 0; m < modes.vectors.cols(); ++m) v += normal(rng) * modes.vectors.col(m);
  const double e = 0.5 * v.cwiseProduct(mass).dot(v);
  if (!(e > 0.0)) throw std::runtime_error("random_unit_velocity: degenerate draw");
  return v / std::sqrt(e);
}

ObservabilityReport estimate_obs_constant(const Problem& problem, const EnsembleSettings& settings) {
  if (settings.members == 0) throw std::invalid_argument("estimate_obs_constant: ensemble is empty");
  if (!(settings.horizon > 0.0)) throw std::invalid_argument("estimate_obs_constant: horizon must be positive");
  const auto& lap = *problem.laplacian;
  const LaplacianModes modes = laplacian_modes(lap, settings.modes);
  const bool semilinear = problem.nonlinearity && !problem.nonlinearity->is_zero();
  const Problem lin = linear_copy(problem);

  SimulationOptions opts;
  opts.dt = settings.dt;
  opts.t_final = settings.horizon;
  opts.stride = settings.stride;

  ObservabilityReport report;
  report.horizon = settings.horizon;
  report.members = settings.members;
  report.seed = settings.seed;
  report.modes = static_cast<std::size_t>(modes.vectors.cols());
  report.linear_ratios.resize(settings.members);
  if (semilinear) report.semilinear_ratios.resize(settings.members);

  const Eigen::VectorXd u0 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(lap.size()));
  parallel_for(settings.members, [&](std::size_t m) {
    const Eigen::VectorXd v0 = settings.scale * random_unit_velocity(modes, lap.mass(), settings.seed, m);
    report.linear_ratios[m] = observability_ratio(simulate(lin, u0, v0, opts), settings.horizon);
    if (semilinear) report.semilinear_ratios[m] = observability_ratio(simulate(problem, u0, v0, opts), settings.horizon);
  });

  report.c_linear = max_ratio(report.linear_ratios);
  if (semilinear) report.c_semilinear = max_ratio(report.semilinear_ratios);
  if (report.c_linear && (!semilinear || report.c_semilinear))
    report.c_estimate = semilinear ? std::max(*report.c_linear, *report.c_semilinear) : *report.c_linear;
  return report;
}

DecayEstimate decay_prediction(double c_obs, double t0) {
  if (!(c_obs > 0.0) || !(t0 > 0.0))
    throw std::invalid_argument("decay_prediction: observability constant and control time must be positive");
  DecayEstimate d;
  d.c_obs = c_obs;
  d.c_hat = 1.0 / c_obs;
  d.t0 = t0;
  d.lambda_predicted = std::log1p(d.c_hat) / t0;
  return d;
}

DecayFit fit_decay(const std::vector<double>& times, const std::vector<double>& energies, double start, double end) {
  if (times.size() != energies.size()) throw std::invalid_argument("fit_decay: series lengths differ");
  const double tol = 1e-9 * std::max({1.0, std::abs(start), std::abs(end)});
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < start - tol || times[i] > end + tol) continue;
    if (!(energies[i] > 0.0))
      throw std::invalid_argument("fit_decay: nonpositive energy at t = " + std::to_string(times[i]));
    x.push_back(times[i]);
    y.push_back(std::log(energies[i]));
  }
  if (x.size() < 4) throw std::invalid_argument("fit_decay: fewer than 4 samples in the window");
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  DecayFit fit;
  fit.samples = x.size();
  const double slope = sxy / sxx;
  fit.lambda = -slope;
  if (syy == 0.0) {
    fit.r_squared = 1.0;
  } else {
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - (my + slope * (x[i] - mx));
      ss_res += r * r;
    }
    fit.r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  }
  return fit;
}

double resolvent_norm(const Eigen::MatrixXd& generator, double mu) {
  Eigen::MatrixXcd shifted = generator.cast<std::complex<double>>();
  shifted.diagonal().array() -= std::complex<double>(0.0, mu);
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(shifted);
  const double smin = svd.singularValues().minCoeff();
  if (!(smin > 0.0)) return std::numeric_limits<double>::infinity();
  return 1.0 / smin;
}

ResolventScan resolvent_scan(const BlockGenerator& generator, double mu_min, double mu_max, std::size_t n_points) {
  if (n_points == 0) throw std::invalid_argument("resolvent_scan: need at least one mu");
  if (n_points > 1 && !(mu_max > mu_min)) throw std::invalid_argument("resolvent_scan: need mu_min < mu_max");
  const Eigen::MatrixXd a = generator.dense();

  ResolventScan scan;
  scan.mu.resize(n_points);
  scan.norms.resize(n_points);
  for (std::size_t i = 0; i < n_points; ++i)
    scan.mu[i] = n_points == 1 ? mu_min
                               : (i + 1 == n_points ? mu_max : mu_min + (mu_max - mu_min) * i / (n_points - 1));
  parallel_for(n_points, [&](std::size_t i) { scan.norms[i] = resolvent_norm(a, scan.mu[i]); });

  const auto top = std::max_element(scan.norms.begin(), scan.norms.end());
  scan.sup = *top;
  scan.argmax = scan.mu[static_cast<std::size_t>(top - scan.norms.begin())];

  // Zoom around the argmax: a pole on the imaginary axis keeps growing.
  double centre = scan.argmax;
  double half_width = n_points > 1 ? (mu_max - mu_min) / (n_points - 1) : 0.01 * std::max(1.0, std::abs(centre));
  scan.refined_sup = scan.sup;
  constexpr std::size_t kZoomPoints = 41;
  for (int level = 0; level < 3 && std::isfinite(scan.refined_sup); ++level) {
    std::vector<double> mus(kZoomPoints);
    std::vector<double> vals(kZoomPoints);
    for (std::size_t i = 0; i < kZoomPoints; ++i) mus[i] = centre - half_width + 2.0 * half_width * i / (kZoomPoints - 1);
    parallel_for(kZoomPoints, [&](std::size_t i) { vals[i] = resolvent_norm(a, mus[i]); });
    const auto best = std::max_element(vals.begin(), vals.end());
    centre = mus[static_cast<std::size_t>(best - vals.begin())];
    scan.refined_sup = std::max(scan.refined_sup, *best);
    half_width = 2.0 * half_width / (kZoomPoints - 1);
  }
  const bool diverging = scan.sup > kResolventBlowup || scan.refined_sup >= 10.0 * scan.sup;
  scan.verdict = diverging ? ResolventVerdict::Diverging : ResolventVerdict::Bounded;
  if (diverging) scan.mu_star = centre;
  return scan;
}

TruncationStudy truncation_study(const Problem& problem, const NonlinearitySpec& base, const std::vector<int>& levels,
                                 const Eigen::VectorXd& u0, const Eigen::VectorXd& v0, const SimulationOptions& options) {
  if (levels.empty()) throw std::invalid_argument("truncation_study: no levels given");
  for (std::size_t i = 1; i < levels.size(); ++i)
    if (levels[i] <= levels[i - 1]) throw std::invalid_argument("truncation_study: levels must ascend");
  SimulationOptions opts = options;
  opts.keep_states = true;
  std::vector<Trajectory> runs(levels.size());
  parallel_for(levels.size(), [&](std::size_t i) {
    Problem p = problem;
    p.nonlinearity = truncate(base, levels[i]);
    runs[i] = simulate(p, u0, v0, opts);
  });

  const auto& lap = *problem.laplacian;
  TruncationStudy study;
  study.levels = levels;
  for (const auto& r : runs) study.max_amplitude.push_back(r.max_amplitude);
  for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
    TruncationPair pair{levels[i], levels[i + 1], 0.0};
    const auto& a = runs[i].states;
    const auto& b = runs[i + 1].states;
    for (std::size_t s = 0; s < std::min(a.size(), b.size()); ++s) {
      const Eigen::VectorXd du = a[s].u - b[s].u;
      const Eigen::VectorXd dv = a[s].v - b[s].v;
      pair.difference = std::max(pair.difference, std::sqrt(lap.mass_form(dv, dv) + lap.stiffness_form(du, du)));
    }
    study.pairs.push_back(pair);
  }
  return study;
}

HarauxReport haraux_equivalence_experiment(const Problem& problem, const Eigen::VectorXd& indicator,
                                           const Eigen::VectorXd& u0, const Eigen::VectorXd& v0,
                                           const SimulationOptions& options, double horizon, double fit_start,
                                           double fit_end) {
  HarauxReport report;
  report.horizon = horizon;
  report.fit_start = fit_start;
  report.fit_end = fit_end;

  const Problem damped = linear_copy(problem);
  const Trajectory d = simulate(damped, u0, v0, options);
  report.damped_fit = fit_decay(d.times(), d.totals(), fit_start, fit_end);
  report.decay_observed = report.damped_fit.r_squared >= 0.99 && report.damped_fit.lambda > 1e-8;
  report.damped_ratio = observability_ratio(d, horizon);

  Problem undamped = damped;
  undamped.damping.setZero();
  SimulationOptions obs = options;
  obs.t_final = horizon;
  obs.observation_weight = indicator;
  const Trajectory y = simulate(undamped, u0, v0, obs);
  report.undamped_ratio = observation_ratio(y, horizon);
  report.observable = report.undamped_ratio.has_value() && std::isfinite(*report.undamped_ratio);
  report.equivalent = report.decay_observed == report.observable;
  return report;
}

}  // namespace wavezar
