#include "wavezar/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "wavezar/support.hpp"

namespace wavezar {

namespace {

void nonlinear_term(const TruncatedNonlinearity* tn, const Eigen::VectorXd& u, Eigen::VectorXd& out) {
  if (!tn || tn->is_zero()) {
    out.setZero(u.size());
    return;
  }
  out.resize(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) out[i] = tn->value(u[i]);
}

double nonlinear_energy(const TruncatedNonlinearity* tn, const Eigen::VectorXd& u, const Eigen::VectorXd& mass) {
  if (!tn || tn->is_zero()) return 0.0;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) sum += mass[i] * tn->primitive(u[i]);
  return sum;
}

void check_finite(const Eigen::VectorXd& u, const Eigen::VectorXd& v, double t) {
  if (u.allFinite() && v.allFinite()) return;
  std::ostringstream os;
  os << "integrator: non-finite state (blow-up) at t = " << t;
  throw BlowUpError(t, os.str());
}

struct HalfEnergy {
  double kinetic = 0.0;
  double potential = 0.0;
  double nonlinear = 0.0;
};

double interpolate(const std::vector<EnergyRecord>& records, const std::vector<double>& values, double t) {
  if (records.empty() || values.empty()) throw std::invalid_argument("trajectory has no records");
  if (t <= records.front().t) return values.front();
  const double tol = 1e-9 * std::max(1.0, std::abs(t));
  if (t > records.back().t + tol)
    throw std::invalid_argument("trajectory does not cover the requested time");
  if (t >= records.back().t) return values.back();
  auto it = std::lower_bound(records.begin(), records.end(), t, [](const EnergyRecord& r, double x) { return r.t < x; });
  const std::size_t hi = static_cast<std::size_t>(it - records.begin());
  const std::size_t lo = hi - 1;
  const double w = (t - records[lo].t) / (records[hi].t - records[lo].t);
  return (1.0 - w) * values[lo] + w * values[hi];
}

}  // namespace

Problem make_problem(const SparseOperator& laplacian, const DampingField& damping,
                     std::optional<TruncatedNonlinearity> nonlinearity) {
  Problem p;
  p.laplacian = std::make_shared<const SparseOperator>(laplacian);
  p.damping = laplacian.restrict_nodes(damping.values);
  p.nonlinearity = std::move(nonlinearity);
  return p;
}

double cfl_dt(const Mesh& mesh, double safety) {
  if (safety > 1.0) {
    std::ostringstream os;
    os << "cfl_dt: safety factor " << safety << " exceeds 1; the leapfrog step may be unstable";
    warn(os.str());
  }
  return safety * mesh.min_spacing() / std::sqrt(static_cast<double>(mesh.dimension()));
}

WaveState step(const WaveState& state, double dt, const SparseOperator& lap, const Eigen::VectorXd& damping,
               const TruncatedNonlinearity* nonlinearity) {
  Eigen::VectorXd force = lap.apply(state.u);
  if (nonlinearity && !nonlinearity->is_zero()) {
    Eigen::VectorXd f;
    nonlinear_term(nonlinearity, state.u, f);
    force -= f;
  }
  const Eigen::ArrayXd half = 0.5 * dt * damping.array();
  WaveState next;
  next.v = (((1.0 - half) * state.v.array() + dt * force.array()) / (1.0 + half)).matrix();
  next.u = state.u + dt * next.v;
  next.t = state.t + dt;
  check_finite(next.u, next.v, next.t);
  return next;
}

WaveState stagger(const Eigen::VectorXd& u0, const Eigen::VectorXd& v0, double dt, const Problem& problem) {
  const auto& lap = *problem.laplacian;
  if (static_cast<std::size_t>(u0.size()) != lap.size() || static_cast<std::size_t>(v0.size()) != lap.size())
    throw std::invalid_argument("stagger: initial data size does not match the dof count");
  Eigen::VectorXd accel = lap.apply(u0) - problem.damping.cwiseProduct(v0);
  if (problem.nonlinearity) {
    Eigen::VectorXd f;
    nonlinear_term(&*problem.nonlinearity, u0, f);
    accel -= f;
  }
  return WaveState{u0, v0 - 0.5 * dt * accel, 0.0};
}

EnergyRecord energy(const WaveState& state, const SparseOperator& lap, const TruncatedNonlinearity* nonlinearity) {
  EnergyRecord r;
  r.t = state.t;
  r.kinetic = 0.5 * lap.mass_form(state.v, state.v);
  r.potential = 0.5 * lap.stiffness_form(state.u, state.u);
  r.nonlinear = nonlinear_energy(nonlinearity, state.u, lap.mass());
  r.linear = r.kinetic + r.potential;
  r.total = r.linear + r.nonlinear;
  return r;
}

std::vector<double> Trajectory::times() const {
  std::vector<double> out;
  out.reserve(energy.size());
  for (const auto& r : energy) out.push_back(r.t);
  return out;
}

std::vector<double> Trajectory::totals() const {
  std::vector<double> out;
  out.reserve(energy.size());
  for (const auto& r : energy) out.push_back(r.total);
  return out;
}

double Trajectory::dissipated_at(double t) const { return interpolate(energy, dissipated, t); }

double Trajectory::observed_at(double t) const {
  if (observed.empty()) throw std::invalid_argument("trajectory has no observation accumulator");
  return interpolate(energy, observed, t);
}

Trajectory simulate(const Problem& problem, const Eigen::VectorXd& u0, const Eigen::VectorXd& v0,
                    const SimulationOptions& options) {
  if (!(options.dt > 0.0)) throw std::invalid_argument("simulate: dt must be positive");
  if (!(options.t_final > 0.0)) throw std::invalid_argument("simulate: t_final must be positive");
  if (options.stride == 0) throw std::invalid_argument("simulate: stride must be >= 1");
  const auto& lap = *problem.laplacian;
  const Eigen::VectorXd& mass = lap.mass();
  const double dt = options.dt;
  const TruncatedNonlinearity* tn = problem.nonlinearity ? &*problem.nonlinearity : nullptr;
  if (tn && tn->truncated() && dt * tn->lipschitz() > 0.5) {
    std::ostringstream os;
    os << "simulate: dt * C_k = " << dt * tn->lipschitz() << " exceeds 0.5";
    warn(os.str());
  }
  const bool observe = options.observation_weight.has_value();
  if (observe && static_cast<std::size_t>(options.observation_weight->size()) != lap.size())
    throw std::invalid_argument("simulate: observation weight size does not match the dof count");

  const auto n_steps = static_cast<std::size_t>(std::max(1.0, std::ceil(options.t_final / dt - 1e-9)));

  Trajectory traj;
  traj.dt = dt;
  traj.stride = options.stride;

  WaveState state = stagger(u0, v0, dt, problem);
  Eigen::VectorXd u_prev = state.u - dt * state.v;
  check_finite(state.u, state.v, 0.0);

  auto half_energy = [&](const Eigen::VectorXd& u_next, const Eigen::VectorXd& u_cur, const Eigen::VectorXd& v_half,
                         double F_next, double F_cur) {
    HalfEnergy e;
    e.kinetic = 0.5 * lap.mass_form(v_half, v_half);
    e.potential = 0.5 * lap.stiffness_form(u_next, u_cur);
    e.nonlinear = 0.5 * (F_next + F_cur);
    return e;
  };
  auto weighted_rate = [&](const Eigen::VectorXd& weight, const Eigen::VectorXd& va, const Eigen::VectorXd& vb) {
    const Eigen::ArrayXd vbar = 0.5 * (va.array() + vb.array());
    return dt * (mass.array() * weight.array() * vbar * vbar).sum();
  };

  double F_prev = nonlinear_energy(tn, u_prev, mass);
  double F_cur = nonlinear_energy(tn, state.u, mass);
  HalfEnergy lag = half_energy(state.u, u_prev, state.v, F_cur, F_prev);
  double D_lag = 0.0;
  double O_lag = 0.0;
  double D_origin = 0.0;
  double O_origin = 0.0;

  for (std::size_t n = 0; n <= n_steps; ++n) {
    traj.max_amplitude = std::max(traj.max_amplitude, state.u.cwiseAbs().maxCoeff());
    WaveState next = step(state, dt, lap, problem.damping, tn);
    const double F_next = nonlinear_energy(tn, next.u, mass);
    const HalfEnergy lead = half_energy(next.u, state.u, next.v, F_next, F_cur);
    const double D_lead = D_lag + weighted_rate(problem.damping, state.v, next.v);
    const double O_lead = observe ? O_lag + weighted_rate(*options.observation_weight, state.v, next.v) : 0.0;
    if (n == 0) {
      D_origin = 0.5 * (D_lag + D_lead);
      O_origin = 0.5 * (O_lag + O_lead);
    }
    if (n % options.stride == 0 || n == n_steps) {
      EnergyRecord r;
      r.t = static_cast<double>(n) * dt;
      r.kinetic = 0.5 * (lag.kinetic + lead.kinetic);
      r.potential = 0.5 * (lag.potential + lead.potential);
      r.nonlinear = 0.5 * (lag.nonlinear + lead.nonlinear);
      r.linear = r.kinetic + r.potential;
      r.total = r.linear + r.nonlinear;
      traj.energy.push_back(r);
      traj.dissipated.push_back(0.5 * (D_lag + D_lead) - D_origin);
      if (observe) traj.observed.push_back(0.5 * (O_lag + O_lead) - O_origin);
      if (options.keep_states) traj.states.push_back(WaveState{state.u, 0.5 * (state.v + next.v), r.t});
    }
    lag = lead;
    D_lag = D_lead;
    O_lag = O_lead;
    F_cur = F_next;
    state = std::move(next);
  }
  return traj;
}

IdentityResidual energy_identity_residual(const Trajectory& trajectory) {
  IdentityResidual out;
  if (trajectory.energy.empty()) return out;
  const double e0 = trajectory.energy.front().total;
  const double denom = std::max(e0, std::numeric_limits<double>::min());
  out.residual.reserve(trajectory.energy.size());
  for (std::size_t i = 0; i < trajectory.energy.size(); ++i) {
    const double r = std::abs(trajectory.energy[i].total + trajectory.dissipated[i] - e0) / denom;
    out.residual.push_back(r);
    out.max = std::max(out.max, r);
  }
  return out;
}

}  // namespace wavezar
