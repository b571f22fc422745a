#include "wavezar/runner.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <sstream>

#include "wavezar/support.hpp"

namespace wavezar {

namespace {

double shape_value(const std::string& shape, double arg) { return shape == "cos" ? std::cos(arg) : std::sin(arg); }

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json optional_number(const std::optional<double>& x) { return x ? Json(*x) : Json(nullptr); }

Json vec2(const Vec2& v, int dim) {
  Json out = Json::array();
  for (int a = 0; a < dim; ++a) out.push_back(v[a]);
  return out;
}

Json ratios_json(const std::vector<std::optional<double>>& r) {
  Json out = Json::array();
  for (const auto& x : r) out.push_back(optional_number(x));
  return out;
}

class Context {
 public:
  Context(const ExperimentConfig& config, const std::filesystem::path& out) : setup_(prepare(config)), writer_(out) {}

  Setup& setup() { return setup_; }
  const ExperimentConfig& config() const { return setup_.config; }
  ArtifactWriter& writer() { return writer_; }

  void note(const std::string& message) {
    warnings.push_back(message);
    warn(message);
  }

  GCCReport rays() {
    if (!gcc_) gcc_ = control_time(config().domain, config().damping.region, ray_sampling(config()));
    return *gcc_;
  }

  std::vector<std::string> warnings;

 private:
  Setup setup_;
  ArtifactWriter writer_;
  std::optional<GCCReport> gcc_;
};

std::string energy_csv(const Trajectory& traj) {
  std::string out = csv_line(std::vector<std::string>{"t", "E", "E_kin", "E_pot", "E_nl", "D_accum"});
  for (std::size_t i = 0; i < traj.energy.size(); ++i) {
    const auto& r = traj.energy[i];
    out += csv_line(std::vector<double>{r.t, r.total, r.kinetic, r.potential, r.nonlinear, traj.dissipated[i]});
  }
  return out;
}

std::string energy_plot() {
  return "set datafile separator ','\n"
         "set key autotitle columnhead\n"
         "set logscale y\n"
         "set xlabel 't'\n"
         "set ylabel 'energy'\n"
         "plot 'energy.csv' using 1:2 with lines, '' using 1:6 with lines\n";
}

Json gcc_json(const GCCReport& r, int dim) {
  Json j;
  j["satisfied"] = r.satisfied;
  j["t0_estimate"] = optional_number(r.t0_estimate);
  j["worst_entry_time"] = optional_number(r.worst_entry_time);
  Json ray;
  ray["origin"] = vec2(r.worst_ray.origin, dim);
  ray["direction"] = vec2(r.worst_ray.direction, dim);
  ray["entry_time"] = optional_number(r.worst_ray_entry);
  j["worst_ray"] = ray;
  Json s;
  s["origins_per_axis"] = r.sampling.origins_per_axis;
  s["directions"] = r.sampling.directions;
  s["t_max"] = r.sampling.t_max;
  s["margin"] = kControlTimeMargin;
  j["sampling"] = s;
  j["rays_traced"] = r.rays_traced;
  j["rays_missing"] = r.rays_missing;
  return j;
}

GCCReport do_rays(Context& ctx) {
  const GCCReport r = ctx.rays();
  ctx.writer().stage("gcc_report.json", dump_json(gcc_json(r, ctx.config().domain.dimension)));
  if (!r.satisfied) ctx.note("rays: geometric control condition not satisfied by the sampled rays");
  return r;
}

Trajectory do_simulate(Context& ctx) {
  auto& s = ctx.setup();
  SimulationOptions opt;
  opt.dt = s.dt;
  opt.t_final = s.config.t_final;
  opt.stride = s.config.stride;
  const Trajectory traj = simulate(s.problem, s.u0, s.v0, opt);
  const auto res = energy_identity_residual(traj);
  ctx.writer().stage("energy.csv", energy_csv(traj));
  Json j;
  j["dt"] = s.dt;
  j["t_final"] = traj.energy.back().t;
  j["records"] = traj.energy.size();
  j["dof"] = s.laplacian->size();
  j["nonlinearity"] = s.config.nonlinearity;
  j["truncation_level"] = s.config.truncation_level ? Json(*s.config.truncation_level) : Json(nullptr);
  j["initial_energy"] = traj.energy.front().total;
  j["final_energy"] = traj.energy.back().total;
  j["dissipated"] = traj.dissipated.back();
  j["max_relative_residual"] = res.max;
  j["max_amplitude"] = traj.max_amplitude;
  ctx.writer().stage("residual.json", dump_json(j));
  ctx.writer().stage("energy.gp", energy_plot());
  return traj;
}

ObservabilityReport do_observe(Context& ctx, const std::optional<double>& t0) {
  auto& s = ctx.setup();
  if (t0 && s.config.horizon < *t0) {
    std::ostringstream os;
    os << "observe: horizon " << s.config.horizon << " is shorter than the control time " << *t0;
    ctx.note(os.str());
  }
  EnsembleSettings es;
  es.members = s.config.ensemble;
  es.horizon = s.config.horizon;
  es.seed = s.config.seed;
  es.modes = s.config.modes;
  es.dt = s.dt;
  es.stride = s.config.stride;
  const ObservabilityReport r = estimate_obs_constant(s.problem, es);

  Json j;
  j["horizon"] = r.horizon;
  j["members"] = r.members;
  j["seed"] = r.seed;
  j["modes"] = r.modes;
  j["c_linear"] = optional_number(r.c_linear);
  j["c_semilinear"] = optional_number(r.c_semilinear);
  j["c_estimate"] = optional_number(r.c_estimate);
  j["linear_ratios"] = ratios_json(r.linear_ratios);
  j["semilinear_ratios"] = ratios_json(r.semilinear_ratios);
  ctx.writer().stage("observability.json", dump_json(j));

  std::string csv = csv_line(std::vector<std::string>{"member", "linear", "semilinear"});
  for (std::size_t m = 0; m < r.linear_ratios.size(); ++m) {
    auto cell = [](const std::vector<std::optional<double>>& v, std::size_t i) {
      return i < v.size() && v[i] ? format_number(*v[i]) : std::string("inf");
    };
    const std::string semi = r.semilinear_ratios.empty() ? std::string("") : cell(r.semilinear_ratios, m);
    csv += csv_line(std::vector<std::string>{std::to_string(m), cell(r.linear_ratios, m), semi});
  }
  ctx.writer().stage("observability_ratios.csv", csv);
  if (!r.c_estimate) ctx.note("observe: some ensemble members dissipate nothing by the horizon");
  return r;
}

/// Fits the decay of a fresh simulation; prediction needs both c_obs and t0.
int do_decay(Context& ctx, const std::optional<double>& c_obs, const std::optional<double>& t0) {
  auto& s = ctx.setup();
  SimulationOptions opt;
  opt.dt = s.dt;
  opt.t_final = s.config.t_final;
  opt.stride = s.config.stride;
  const Trajectory traj = simulate(s.problem, s.u0, s.v0, opt);
  ctx.writer().stage("energy.csv", energy_csv(traj));

  const double start = s.config.fit_start.value_or(t0.value_or(0.0));
  const double end = s.config.fit_end.value_or(s.config.t_final);
  const DecayFit fit = fit_decay(traj.times(), traj.totals(), start, end);

  DecayEstimate est;
  if (c_obs && t0) est = decay_prediction(*c_obs, *t0);
  est.lambda_fitted = fit.lambda;
  est.r_squared = fit.r_squared;
  est.fit_start = start;
  est.fit_end = end;

  Json j;
  j["c_obs"] = c_obs ? Json(est.c_obs) : Json(nullptr);
  j["c_hat"] = c_obs ? Json(est.c_hat) : Json(nullptr);
  j["t0"] = optional_number(t0);
  j["lambda_predicted"] = (c_obs && t0) ? Json(est.lambda_predicted) : Json(nullptr);
  j["lambda_fitted"] = fit.lambda;
  j["r_squared"] = fit.r_squared;
  j["fit_start"] = start;
  j["fit_end"] = end;
  j["fit_samples"] = fit.samples;

  int code = kExitOk;
  std::string status = "unchecked";
  if (c_obs && t0) {
    status = "ok";
    if (fit.lambda < est.lambda_predicted) {
      status = "below_prediction";
      ctx.note("decay: fitted rate is below the predicted rate");
    }
    if (fit.lambda < 0.5 * est.lambda_predicted) {
      status = "violation";
      code = kExitDecayViolation;
    }
  } else {
    ctx.note("decay: no prediction (control time or observability constant unavailable)");
  }
  j["status"] = status;
  ctx.writer().stage("decay.json", dump_json(j));
  ctx.writer().stage("energy.gp", energy_plot());
  return code;
}

void do_resolvent(Context& ctx) {
  auto& s = ctx.setup();
  const std::size_t dof = s.laplacian->size();
  if (dof > kDenseDofCap) {
    std::ostringstream os;
    os << "resolvent: refused, " << dof << " dof exceeds the dense cap of " << kDenseDofCap;
    throw std::length_error(os.str());
  }
  const BlockGenerator gen(s.laplacian, s.problem.damping);
  const ResolventScan scan = resolvent_scan(gen, s.config.mu_min, s.config.mu_max, s.config.mu_points);
  Json j;
  j["dof"] = dof;
  j["mu_min"] = s.config.mu_min;
  j["mu_max"] = s.config.mu_max;
  j["mu_points"] = s.config.mu_points;
  j["verdict"] = to_string(scan.verdict);
  j["sup"] = scan.sup;
  j["argmax"] = scan.argmax;
  j["refined_sup"] = scan.refined_sup;
  j["mu_star"] = optional_number(scan.mu_star);
  j["blowup_threshold"] = kResolventBlowup;
  ctx.writer().stage("resolvent.json", dump_json(j));
  std::string csv = csv_line(std::vector<std::string>{"mu", "norm"});
  for (std::size_t i = 0; i < scan.mu.size(); ++i) csv += csv_line(std::vector<double>{scan.mu[i], scan.norms[i]});
  ctx.writer().stage("resolvent.csv", csv);
  ctx.writer().stage("resolvent.gp",
                     "set datafile separator ','\n"
                     "set key autotitle columnhead\n"
                     "set logscale y\n"
                     "set xlabel 'mu'\n"
                     "set ylabel 'resolvent norm'\n"
                     "plot 'resolvent.csv' using 1:2 with lines\n");
}

void do_truncation(Context& ctx) {
  auto& s = ctx.setup();
  SimulationOptions opt;
  opt.dt = s.dt;
  opt.t_final = s.config.t_final;
  opt.stride = s.config.stride;
  const TruncationStudy study =
      truncation_study(s.problem, s.config.nonlinearity_spec(), s.config.k_list, s.u0, s.v0, opt);
  std::string csv =
      csv_line(std::vector<std::string>{"k_low", "k_high", "difference", "max_amplitude_low", "max_amplitude_high"});
  for (std::size_t i = 0; i < study.pairs.size(); ++i) {
    const auto& p = study.pairs[i];
    csv += csv_line(std::vector<std::string>{std::to_string(p.k_low), std::to_string(p.k_high),
                                             format_number(p.difference), format_number(study.max_amplitude[i]),
                                             format_number(study.max_amplitude[i + 1])});
  }
  ctx.writer().stage("truncation.csv", csv);
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"simulate", "observe", "rays", "resolvent",
                                              "truncation", "decay", "pipeline"};
  return names;
}

RaySampling ray_sampling(const ExperimentConfig& config) {
  RaySampling s;
  s.origins_per_axis = config.ray_origins;
  s.directions = config.ray_directions;
  s.t_max = config.ray_t_max;
  return s;
}

Eigen::VectorXd initial_displacement(const Mesh& mesh, const SparseOperator& laplacian, const InitialDataSpec& spec) {
  std::vector<double> nodal(mesh.node_count(), 0.0);
  if (spec.kind != InitialKind::Zero) {
    const auto& ext = mesh.domain().extent;
    for (std::size_t n = 0; n < mesh.node_count(); ++n) {
      const auto p = mesh.point(n);
      double value = spec.amplitude;
      for (int a = 0; a < mesh.dimension(); ++a) {
        const double s = (p[a] - ext[a].lo) / ext[a].length();
        if (spec.kind == InitialKind::Beam && a == 0) {
          const double z = (p[0] - spec.center) / spec.width;
          value *= std::exp(-z * z);
        } else {
          value *= shape_value(spec.shape[a], spec.wavenumber[a] * M_PI * s);
        }
      }
      nodal[n] = value;
    }
  }
  return laplacian.restrict_nodes(nodal);
}

Setup prepare(const ExperimentConfig& config) {
  validate_config(config);
  Mesh mesh = build_mesh(config.domain, config.nodes);
  auto lap = std::make_shared<const SparseOperator>(assemble_laplacian(mesh));
  DampingField damping = sample_damping(mesh, config.damping, config.require_assumption);
  Problem problem = make_problem(*lap, damping, config.truncated_nonlinearity());
  const double dt = config.dt.value_or(cfl_dt(mesh, config.safety));
  Eigen::VectorXd u0 = initial_displacement(mesh, *lap, config.initial);
  Eigen::VectorXd v0 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(lap->size()));
  return Setup{config, std::move(mesh), lap, std::move(damping), std::move(problem), dt, std::move(u0), std::move(v0)};
}

RunOutcome run(const std::string& subcommand, const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  RunOutcome outcome;
  const std::string started = utc_now();
  std::optional<Context> ctx;
  try {
    ctx.emplace(config, out_dir);
  } catch (const std::exception& e) {
    outcome.exit_code = kExitConfig;
    outcome.error = e.what();
    return outcome;
  }

  try {
    if (subcommand == "simulate") {
      do_simulate(*ctx);
    } else if (subcommand == "observe") {
      const auto g = ctx->rays();
      do_observe(*ctx, g.t0_estimate);
    } else if (subcommand == "rays") {
      do_rays(*ctx);
    } else if (subcommand == "resolvent") {
      do_resolvent(*ctx);
    } else if (subcommand == "truncation") {
      do_truncation(*ctx);
    } else if (subcommand == "decay" || subcommand == "pipeline") {
      const bool pipeline = subcommand == "pipeline";
      const GCCReport g = pipeline ? do_rays(*ctx) : ctx->rays();
      if (pipeline && !g.satisfied)
        throw std::runtime_error("pipeline: geometric control condition not satisfied; no control time to chain");
      std::optional<double> c_obs;
      if (pipeline) {
        const auto obs = do_observe(*ctx, g.t0_estimate);
        if (!obs.c_estimate) throw std::runtime_error("pipeline: observability constant is infinite");
        c_obs = obs.c_estimate;
      } else if (g.satisfied) {
        EnsembleSettings es;
        es.members = ctx->config().ensemble;
        es.horizon = ctx->config().horizon;
        es.seed = ctx->config().seed;
        es.modes = ctx->config().modes;
        es.dt = ctx->setup().dt;
        es.stride = ctx->config().stride;
        c_obs = estimate_obs_constant(ctx->setup().problem, es).c_estimate;
      }
      outcome.exit_code = do_decay(*ctx, c_obs, g.t0_estimate);
    } else {
      throw std::invalid_argument("unknown subcommand '" + subcommand + "'");
    }

    ctx->writer().stage("resolved_config.ini", render_config(ctx->config()));
    Json manifest;
    manifest["subcommand"] = subcommand;
    manifest["seed"] = ctx->config().seed;
    manifest["started"] = started;
    manifest["finished"] = utc_now();
    manifest["threads"] = worker_count();
    Json arts = Json::array();
    for (const auto& r : ctx->writer().records()) {
      Json a;
      a["name"] = r.name;
      a["fnv1a64"] = r.hash;
      a["bytes"] = r.bytes;
      arts.push_back(a);
    }
    manifest["artifacts"] = arts;
    manifest["warnings"] = ctx->warnings;
    ctx->writer().stage("run_manifest.json", dump_json(manifest));
    ctx->writer().commit();
    outcome.artifacts = ctx->writer().records();
    outcome.warnings = ctx->warnings;
  } catch (const std::exception& e) {
    outcome.exit_code = kExitFailure;
    outcome.error = e.what();
    outcome.warnings = ctx->warnings;
    outcome.artifacts.clear();
  }
  return outcome;
}

}  // namespace wavezar
