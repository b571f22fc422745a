// Runs the ten acceptance criteria and prints one PASS/FAIL line for each.
#include <stdexcept>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "json.hpp"
#include "oracles/spectra.hpp"
#include "wavezar/runner.hpp"
#include "wavezar/support.hpp"

using namespace wavezar;
namespace fs = std::filesystem;

namespace {

struct Result {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("wavezar_acceptance_" + name);
  fs::remove_all(p);
  return p;
}

Result energy_identity() {
  const auto t0 = std::chrono::steady_clock::now();
  const Setup s = prepare(th::load("configs/reference_1d.ini"));
  SimulationOptions opt{s.dt, s.config.t_final, s.config.stride, false, {}};
  const double r1 = energy_identity_residual(simulate(s.problem, s.u0, s.v0, opt)).max;
  const double elapsed = seconds_since(t0);
  opt.dt = s.dt / 2.0;
  opt.stride = 2 * s.config.stride;
  const double r2 = energy_identity_residual(simulate(s.problem, s.u0, s.v0, opt)).max;
  const double factor = r1 / r2;
  return {r1 <= 5e-4 && factor >= 3.5 && elapsed < 10.0,
          fmt("max residual %.3g, halving dt reduces it %.3gx, runtime %.3gs", r1, factor, elapsed)};
}

Result conservation() {
  ExperimentConfig c = th::load("configs/reference_1d.ini");
  c.damping.a0 = 0.0;
  c.require_assumption = false;
  c.nonlinearity = "zero";
  c.truncation_level.reset();
  const Setup s = prepare(c);
  const Trajectory traj = simulate(s.problem, s.u0, s.v0, {s.dt, 10.0, 1, false, {}});
  const double e0 = traj.energy.front().total;
  double drift = 0.0;
  for (const auto& e : traj.energy) drift = std::max(drift, std::abs(e.total - e0) / e0);
  return {drift <= 1e-8, fmt("relative drift %.3g over T = 10", drift)};
}

Result control_time_check() {
  auto t0 = std::chrono::steady_clock::now();
  const GCCReport one = control_time(th::mixed_interval(), th::box1(0.4, 0.6), {});
  const double e1 = seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  const GCCReport two = control_time(th::square(), th::box2(0.4, 0.6, 0.0, 1.0), {});
  const double e2 = seconds_since(t0);
  const bool one_ok = one.satisfied && *one.t0_estimate >= 0.8 && *one.t0_estimate <= 0.85;
  const bool vertical = two.worst_ray.direction[0] == 0.0 && std::abs(two.worst_ray.direction[1]) == 1.0;
  const bool trapped = !first_entry_time(two.worst_ray, th::box2(0.4, 0.6, 0.0, 1.0)).has_value();
  const bool two_ok = !two.satisfied && vertical && trapped;
  return {one_ok && two_ok && e1 < 5.0 && e2 < 5.0,
          fmt("1D T0 %.4g; 2D strip satisfied=%g, witness x=%.3g vertical; runtimes %.2gs", *one.t0_estimate,
              two.satisfied ? 1.0 : 0.0, two.worst_ray.origin[0], std::max(e1, e2))};
}

nlohmann::json pipeline_decay;

Result exponential_decay() {
  const fs::path out = scratch("decay");
  const RunOutcome r = run("pipeline", th::load("configs/pipeline_1d.ini"), out);
  if (r.exit_code != kExitOk && r.exit_code != kExitDecayViolation) return {false, "pipeline failed: " + r.error};
  pipeline_decay = nlohmann::json::parse(slurp(out / "decay.json"));
  const double r2 = pipeline_decay["r_squared"];
  const double fitted = pipeline_decay["lambda_fitted"];
  const double predicted = pipeline_decay["lambda_predicted"];
  const double t0 = pipeline_decay["t0"];
  const double end = pipeline_decay["fit_end"];
  return {r2 >= 0.99 && fitted >= 0.5 * predicted && end == 20.0,
          fmt("fit on [%.3g, %.3g]: R^2 %.4f, lambda_fit %.4g", t0, end, r2, fitted) +
              fmt(" (C_obs %.4g)", pipeline_decay["c_obs"].get<double>()) + fmt(", lambda0 = %.4g", predicted)};
}

Result contrast() {
  auto fitted = [](const char* rel) {
    const fs::path out = scratch(fs::path(rel).stem().string());
    const RunOutcome r = run("decay", th::load(rel), out);
    if (!r.error.empty()) throw std::runtime_error(r.error);
    return nlohmann::json::parse(slurp(out / "decay.json"))["lambda_fitted"].get<double>();
  };
  const ExperimentConfig strip = th::load("configs/strip_2d.ini");
  const ExperimentConfig frame = th::load("configs/frame_2d.ini");
  const bool same = strip.nodes == frame.nodes && strip.damping.a0 == frame.damping.a0;
  const double ls = fitted("configs/strip_2d.ini");
  const double lf = fitted("configs/frame_2d.ini");
  return {same && ls <= 0.1 * lf, fmt("strip lambda %.4g, frame lambda %.4g, ratio %.3g", ls, lf, ls / lf)};
}

Result observability() {
  const Setup s = prepare(th::load("configs/reference_1d.ini"));
  EnsembleSettings es;
  es.members = 20;
  es.horizon = 2.0;
  es.dt = s.dt;
  es.seed = 42;
  const ObservabilityReport a = estimate_obs_constant(s.problem, es);
  es.scale = 3.0;
  const ObservabilityReport b = estimate_obs_constant(s.problem, es);
  bool finite = true;
  double lo = 1e300, hi = 0.0, change = 0.0;
  for (const auto* rep : {&a, &b})
    for (const auto* list : {&rep->linear_ratios, &rep->semilinear_ratios})
      for (const auto& r : *list) finite = finite && r && std::isfinite(*r);
  if (!finite) return {false, "unobservable member"};
  for (const auto* list : {&a.linear_ratios, &a.semilinear_ratios})
    for (const auto& r : *list) {
      lo = std::min(lo, *r);
      hi = std::max(hi, *r);
    }
  for (std::size_t m = 0; m < a.linear_ratios.size(); ++m)
    change = std::max(change, std::abs(*b.linear_ratios[m] - *a.linear_ratios[m]) / *a.linear_ratios[m]);
  return {hi / lo <= 5.0 && change < 1e-10,
          fmt("ratios in [%.4g, %.4g], max/min %.4g, scaling by 3 changes linear ratios by %.2g", lo, hi, hi / lo,
              change)};
}

Result resolvent() {
  const auto t0 = std::chrono::steady_clock::now();
  const Mesh mesh = build_mesh(th::mixed_interval(), {65});
  auto lap = std::make_shared<const SparseOperator>(assemble_laplacian(mesh));
  const std::size_t dof = lap->size();
  const double mu_max = 50.0;
  const std::size_t points = 401;
  const double cell = mu_max / (points - 1);

  const DampingField none = sample_damping(mesh, th::damping({mesh.domain().as_box()}, 0.0), false);
  const BlockGenerator g0 = assemble_generator(*lap, none);
  const ResolventScan s0 = resolvent_scan(g0, 0.0, mu_max, points);
  Eigen::EigenSolver<Eigen::MatrixXd> es(g0.dense(), false);
  double nearest = 1e300;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (s0.mu_star) nearest = std::min(nearest, std::abs(*s0.mu_star - std::abs(es.eigenvalues()[i].imag())));
  const bool undamped_ok = s0.verdict == ResolventVerdict::Diverging && nearest <= cell;

  const DampingField full = sample_damping(mesh, th::damping({mesh.domain().as_box()}, 1.0));
  const BlockGenerator g1 = assemble_generator(*lap, full);
  const ResolventScan s1 = resolvent_scan(g1, 0.0, mu_max, points);
  const double oracle0 = oracle::resolvent_norm_lu(g1.dense(), 0.0);
  const double rel = std::abs(s1.norms[0] - oracle0) / oracle0;
  const double elapsed = seconds_since(t0);
  return {dof == 64 && undamped_ok && s1.verdict == ResolventVerdict::Bounded && rel <= 1e-10 && elapsed < 30.0,
          "a=0: " + to_string(s0.verdict) + fmt(", peak %.2g from an eigenfrequency (cell %.3g); ", nearest, cell) +
              fmt("a=1: sup %.4g, scan(0) vs oracle %.2g; runtime %.3gs", s1.sup, rel, elapsed) +
              (s1.verdict == ResolventVerdict::Bounded ? " bounded" : " diverging")};
}

Result truncation() {
  ExperimentConfig c = th::load("configs/reference_1d.ini");
  c.truncation_level.reset();
  const Setup s = prepare(c);
  const SimulationOptions opt{s.dt, c.t_final, c.stride, false, {}};
  const TruncationStudy small = truncation_study(s.problem, cubic(), {1, 2, 4}, 0.5 * s.u0, s.v0, opt);
  bool zero = true;
  for (const auto& p : small.pairs) zero = zero && p.difference == 0.0;
  const TruncationStudy large = truncation_study(s.problem, cubic(), {1, 2, 4, 8, 16}, 3.0 * s.u0, s.v0, opt);
  bool monotone = true;
  for (std::size_t i = 1; i < large.pairs.size(); ++i)
    monotone = monotone && large.pairs[i].difference <= large.pairs[i - 1].difference;
  const double first = large.pairs.front().difference;
  const double last = large.pairs.back().difference;
  std::string diffs;
  for (const auto& p : large.pairs) diffs += fmt(" %.3g", p.difference);
  return {zero && monotone && last <= 1e-3 * first,
          std::string(zero ? "small data all zero" : "small data nonzero") + "; large data differences" + diffs};
}

Result lipschitz() {
  std::mt19937_64 rng(2);
  long violations = 0;
  long pairs = 0;
  for (const auto& spec : {power_law(1.0), power_law(2.0), power_law(3.5), cubic(), linear(), zero_nonlinearity()})
    for (int k : {1, 2, 4}) {
      const auto tn = truncate(spec, k);
      std::uniform_real_distribution<double> u(-3.0 * k, 3.0 * k);
      for (int i = 0; i < 10000; ++i, ++pairs) {
        const double r = u(rng), s = u(rng);
        if (std::abs(tn.value(r) - tn.value(s)) > tn.lipschitz() * std::abs(r - s)) ++violations;
      }
    }
  return {violations == 0, fmt("%.0f pairs, %.0f violations", double(pairs), double(violations))};
}

Result reproducibility() {
  const fs::path a = scratch("repro_a");
  const fs::path b = scratch("repro_b");
  ExperimentConfig c = th::load("configs/pipeline_1d.ini");
  c.seed = 42;
  const RunOutcome ra = run("pipeline", c, a);
  const RunOutcome rb = run("pipeline", c, b);
  if (ra.artifacts.empty() || rb.artifacts.empty()) return {false, "pipeline failed"};
  std::size_t compared = 0;
  bool identical = ra.artifacts.size() == rb.artifacts.size();
  for (const auto& art : ra.artifacts) {
    if (art.name == "run_manifest.json") continue;  // carries timestamps
    identical = identical && slurp(a / art.name) == slurp(b / art.name);
    ++compared;
  }
  return {identical, fmt("%.0f artifacts compared byte for byte", double(compared))};
}

}  // namespace

int main() {
  set_warning_sink([](const std::string&) {});
  const std::vector<std::pair<std::string, std::function<Result()>>> criteria{
      {"energy identity", energy_identity},
      {"conservation", conservation},
      {"control time", control_time_check},
      {"exponential decay", exponential_decay},
      {"damping placement contrast", contrast},
      {"observability", observability},
      {"resolvent criterion", resolvent},
      {"truncation convergence", truncation},
      {"lipschitz", lipschitz},
      {"reproducibility", reproducibility},
  };
  int failures = 0;
  int index = 0;
  for (const auto& [name, fn] : criteria) {
    ++index;
    Result r;
    try {
      r = fn();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    failures += !r.pass;
    std::printf("[%s] %2d %s: %s\n", r.pass ? "PASS" : "FAIL", index, name.c_str(), r.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
