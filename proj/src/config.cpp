#include "wavezar/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "wavezar/integrator.hpp"

namespace wavezar {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  return out;
}

std::vector<std::string> words(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string w;
  while (is >> w) out.push_back(w);
  return out;
}

std::string fmt(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

struct Entry {
  std::string value;
  int line = 0;
};

class Table {
 public:
  void put(const std::string& section, const std::string& key, Entry e) { data_[section + "." + key] = std::move(e); }

  bool has(const std::string& key) const { return data_.count(key) != 0; }

  const std::string& raw(const std::string& key) const {
    used_.insert(key);
    return data_.at(key).value;
  }

  ConfigError error(const std::string& key, const std::string& what) const {
    const auto it = data_.find(key);
    std::string where = it == data_.end() ? "" : " (line " + std::to_string(it->second.line) + ")";
    return ConfigError("config: " + key + where + ": " + what);
  }

  double number(const std::string& key) const {
    const std::string& v = raw(key);
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) throw error(key, "expected a number, got '" + v + "'");
    return out;
  }

  long integer(const std::string& key) const {
    const std::string& v = raw(key);
    long out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) throw error(key, "expected an integer, got '" + v + "'");
    return out;
  }

  std::vector<double> numbers(const std::string& key) const {
    std::vector<double> out;
    for (const auto& w : words(raw(key))) {
      double x = 0.0;
      const auto res = std::from_chars(w.data(), w.data() + w.size(), x);
      if (res.ec != std::errc() || res.ptr != w.data() + w.size()) throw error(key, "expected numbers, got '" + w + "'");
      out.push_back(x);
    }
    return out;
  }

  bool boolean(const std::string& key) const {
    const std::string& v = raw(key);
    if (v == "true") return true;
    if (v == "false") return false;
    throw error(key, "expected true or false, got '" + v + "'");
  }

  void reject_unused() const {
    for (const auto& [key, entry] : data_)
      if (!used_.count(key)) throw ConfigError("config: unknown key '" + key + "' (line " + std::to_string(entry.line) + ")");
  }

 private:
  std::map<std::string, Entry> data_;
  mutable std::set<std::string> used_;
};

const std::set<std::string> kSections{"domain", "boundary", "damping", "nonlinearity", "grid",
                                      "time",   "initial",  "analysis", "output"};

Table tokenize(const std::string& text) {
  Table table;
  std::istringstream is(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("config: line " + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!kSections.count(section))
        throw ConfigError("config: line " + std::to_string(lineno) + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config: line " + std::to_string(lineno) + ": expected key = value");
    if (section.empty()) throw ConfigError("config: line " + std::to_string(lineno) + ": key outside any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config: line " + std::to_string(lineno) + ": empty key");
    if (table.has(section + "." + key))
      throw ConfigError("config: line " + std::to_string(lineno) + ": duplicate key " + section + "." + key);
    table.put(section, key, {value, lineno});
  }
  return table;
}

Interval interval_of(const Table& t, const std::string& key) {
  const auto v = t.numbers(key);
  if (v.size() != 2) throw t.error(key, "expected two numbers 'lo hi'");
  return {v[0], v[1]};
}

std::vector<Box> parse_region(const Table& t, const std::string& key, const DomainSpec& domain) {
  const std::string& raw = t.raw(key);
  const auto w = words(raw);
  if (w.size() == 1 && w[0] == "all") return {domain.as_box()};
  if (!w.empty() && w[0] == "frame") {
    if (w.size() != 2 || domain.dimension != 2) throw t.error(key, "'frame <width>' needs a 2D domain");
    double width = 0.0;
    const auto res = std::from_chars(w[1].data(), w[1].data() + w[1].size(), width);
    if (res.ec != std::errc() || !(width > 0.0)) throw t.error(key, "frame width must be a positive number");
    const Interval x = domain.extent[0];
    const Interval y = domain.extent[1];
    return {Box{{{x.lo, x.lo + width}, y}}, Box{{{x.hi - width, x.hi}, y}}, Box{{x, {y.lo, y.lo + width}}},
            Box{{x, {y.hi - width, y.hi}}}};
  }
  std::vector<Box> boxes;
  for (const auto& part : split(raw, ';')) {
    std::vector<double> v;
    for (const auto& s : words(part)) {
      double x = 0.0;
      const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
      if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw t.error(key, "bad number '" + s + "'");
      v.push_back(x);
    }
    if (v.size() != static_cast<std::size_t>(2 * domain.dimension))
      throw t.error(key, "each box needs " + std::to_string(2 * domain.dimension) + " numbers");
    Box b;
    for (int a = 0; a < domain.dimension; ++a) b.axes.push_back({v[2 * a], v[2 * a + 1]});
    boxes.push_back(b);
  }
  return boxes;
}

std::vector<BoundarySegment> parse_face(const Table& t, const std::string& key, Face face, const DomainSpec& domain) {
  std::vector<BoundarySegment> out;
  const Interval along = domain.dimension == 2 ? domain.extent[(face == Face::Left || face == Face::Right) ? 1 : 0]
                                               : Interval{0.0, 0.0};
  for (const auto& part : split(t.raw(key), ',')) {
    const auto w = words(part);
    if (w.empty()) throw t.error(key, "empty segment");
    const auto bc = condition_from_string(w[0]);
    if (!bc) throw t.error(key, "unknown condition '" + w[0] + "' (expected dirichlet or neumann)");
    Interval span = along;
    if (w.size() == 3) {
      double lo = 0.0;
      double hi = 0.0;
      auto r1 = std::from_chars(w[1].data(), w[1].data() + w[1].size(), lo);
      auto r2 = std::from_chars(w[2].data(), w[2].data() + w[2].size(), hi);
      if (r1.ec != std::errc() || r2.ec != std::errc()) throw t.error(key, "bad segment bounds");
      span = {lo, hi};
    } else if (w.size() != 1) {
      throw t.error(key, "segment must be '<condition>' or '<condition> lo hi'");
    }
    out.push_back({face, span, *bc});
  }
  return out;
}

template <class F>
void optional_key(const Table& t, const std::string& key, F&& apply) {
  if (t.has(key)) apply();
}

}  // namespace

NonlinearitySpec ExperimentConfig::nonlinearity_spec() const { return nonlinearity_by_name(nonlinearity, p); }

std::optional<TruncatedNonlinearity> ExperimentConfig::truncated_nonlinearity() const {
  const auto spec = nonlinearity_spec();
  if (truncation_level) return truncate(spec, *truncation_level);
  return untruncated(spec);
}

ExperimentConfig parse_config_text(const std::string& text) {
  const Table t = tokenize(text);
  ExperimentConfig c;

  if (!t.has("domain.dimension")) throw ConfigError("config: missing required key domain.dimension");
  c.domain.dimension = static_cast<int>(t.integer("domain.dimension"));
  if (c.domain.dimension != 1 && c.domain.dimension != 2)
    throw t.error("domain.dimension", "geometry supports dimension 1 or 2");
  const char* axes[] = {"domain.x", "domain.y"};
  for (int a = 0; a < c.domain.dimension; ++a) {
    if (!t.has(axes[a])) throw ConfigError(std::string("config: missing required key ") + axes[a]);
    c.domain.extent.push_back(interval_of(t, axes[a]));
  }
  if (c.domain.dimension == 1 && t.has("domain.y")) throw t.error("domain.y", "not allowed for a 1D domain");
  optional_key(t, "domain.diagnostic", [&] { c.domain.diagnostic = t.boolean("domain.diagnostic"); });

  std::vector<BoundarySegment> segments;
  for (Face face : faces_for(c.domain.dimension)) {
    const std::string key = "boundary." + to_string(face);
    if (!t.has(key)) throw ConfigError("config: missing required key " + key);
    auto seg = parse_face(t, key, face, c.domain);
    segments.insert(segments.end(), seg.begin(), seg.end());
  }
  c.domain.partition = BoundaryPartition(segments);

  if (!t.has("grid.nodes")) throw ConfigError("config: missing required key grid.nodes");
  for (double n : t.numbers("grid.nodes")) {
    if (n != static_cast<int>(n)) throw t.error("grid.nodes", "node counts must be integers");
    c.nodes.push_back(static_cast<int>(n));
  }

  if (t.has("damping.region"))
    c.damping.region = parse_region(t, "damping.region", c.domain);
  else
    c.damping.region = {c.domain.as_box()};
  optional_key(t, "damping.a0", [&] { c.damping.a0 = t.number("damping.a0"); });
  optional_key(t, "damping.amplitude", [&] { c.damping.amplitude = t.number("damping.amplitude"); });
  optional_key(t, "damping.margin", [&] { c.damping.margin = t.number("damping.margin"); });
  optional_key(t, "damping.profile", [&] {
    const auto& v = t.raw("damping.profile");
    if (v == "indicator")
      c.damping.profile = DampingProfile::Indicator;
    else if (v == "smooth-bump")
      c.damping.profile = DampingProfile::SmoothBump;
    else
      throw t.error("damping.profile", "expected indicator or smooth-bump");
  });
  optional_key(t, "damping.require_assumption", [&] { c.require_assumption = t.boolean("damping.require_assumption"); });

  optional_key(t, "nonlinearity.name", [&] { c.nonlinearity = t.raw("nonlinearity.name"); });
  optional_key(t, "nonlinearity.p", [&] { c.p = t.number("nonlinearity.p"); });
  optional_key(t, "nonlinearity.k", [&] {
    if (t.raw("nonlinearity.k") == "none")
      c.truncation_level.reset();
    else
      c.truncation_level = static_cast<int>(t.integer("nonlinearity.k"));
  });
  optional_key(t, "nonlinearity.mode", [&] {
    const auto& v = t.raw("nonlinearity.mode");
    if (v == "existence")
      c.admissibility = AdmissibilityMode::Existence;
    else if (v == "uniqueness")
      c.admissibility = AdmissibilityMode::Uniqueness;
    else
      throw t.error("nonlinearity.mode", "expected existence or uniqueness");
  });
  optional_key(t, "nonlinearity.dimension",
               [&] { c.admissibility_dimension = static_cast<int>(t.integer("nonlinearity.dimension")); });

  optional_key(t, "time.t_final", [&] { c.t_final = t.number("time.t_final"); });
  optional_key(t, "time.dt", [&] {
    if (t.raw("time.dt") == "cfl")
      c.dt.reset();
    else
      c.dt = t.number("time.dt");
  });
  optional_key(t, "time.safety", [&] { c.safety = t.number("time.safety"); });
  optional_key(t, "time.stride", [&] {
    const long s = t.integer("time.stride");
    if (s < 1) throw t.error("time.stride", "must be >= 1");
    c.stride = static_cast<std::size_t>(s);
  });

  optional_key(t, "initial.kind", [&] {
    const auto& v = t.raw("initial.kind");
    if (v == "zero")
      c.initial.kind = InitialKind::Zero;
    else if (v == "mode")
      c.initial.kind = InitialKind::Mode;
    else if (v == "beam")
      c.initial.kind = InitialKind::Beam;
    else
      throw t.error("initial.kind", "expected zero, mode or beam");
  });
  optional_key(t, "initial.amplitude", [&] { c.initial.amplitude = t.number("initial.amplitude"); });
  optional_key(t, "initial.shape_x", [&] { c.initial.shape[0] = t.raw("initial.shape_x"); });
  optional_key(t, "initial.shape_y", [&] { c.initial.shape[1] = t.raw("initial.shape_y"); });
  optional_key(t, "initial.wavenumber_x", [&] { c.initial.wavenumber[0] = t.number("initial.wavenumber_x"); });
  optional_key(t, "initial.wavenumber_y", [&] { c.initial.wavenumber[1] = t.number("initial.wavenumber_y"); });
  optional_key(t, "initial.center", [&] { c.initial.center = t.number("initial.center"); });
  optional_key(t, "initial.width", [&] { c.initial.width = t.number("initial.width"); });

  auto positive_count = [&](const std::string& key) {
    const long v = t.integer(key);
    if (v < 1) throw t.error(key, "must be >= 1");
    return static_cast<std::size_t>(v);
  };
  optional_key(t, "analysis.ensemble", [&] { c.ensemble = positive_count("analysis.ensemble"); });
  optional_key(t, "analysis.seed", [&] {
    const std::string& v = t.raw("analysis.seed");
    std::uint64_t s = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), s);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) throw t.error("analysis.seed", "expected an unsigned integer");
    c.seed = s;
  });
  optional_key(t, "analysis.modes", [&] { c.modes = positive_count("analysis.modes"); });
  optional_key(t, "analysis.horizon", [&] { c.horizon = t.number("analysis.horizon"); });
  optional_key(t, "analysis.mu_min", [&] { c.mu_min = t.number("analysis.mu_min"); });
  optional_key(t, "analysis.mu_max", [&] { c.mu_max = t.number("analysis.mu_max"); });
  optional_key(t, "analysis.mu_points", [&] { c.mu_points = positive_count("analysis.mu_points"); });
  optional_key(t, "analysis.k_list", [&] {
    c.k_list.clear();
    for (double k : t.numbers("analysis.k_list")) {
      if (k != static_cast<int>(k)) throw t.error("analysis.k_list", "levels must be integers");
      c.k_list.push_back(static_cast<int>(k));
    }
  });
  optional_key(t, "analysis.fit_start", [&] {
    if (t.raw("analysis.fit_start") == "t0")
      c.fit_start.reset();
    else
      c.fit_start = t.number("analysis.fit_start");
  });
  optional_key(t, "analysis.fit_end", [&] {
    if (t.raw("analysis.fit_end") == "t_final")
      c.fit_end.reset();
    else
      c.fit_end = t.number("analysis.fit_end");
  });
  optional_key(t, "analysis.ray_origins", [&] { c.ray_origins = static_cast<int>(t.integer("analysis.ray_origins")); });
  optional_key(t, "analysis.ray_directions",
               [&] { c.ray_directions = static_cast<int>(t.integer("analysis.ray_directions")); });
  optional_key(t, "analysis.ray_t_max", [&] { c.ray_t_max = t.number("analysis.ray_t_max"); });

  optional_key(t, "output.dir", [&] { c.output_dir = t.raw("output.dir"); });

  t.reject_unused();
  validate_config(c);
  return c;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void validate_config(const ExperimentConfig& c) {
  auto wrap = [](const std::string& module, auto&& fn) {
    try {
      fn();
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError("config: " + module + " precondition failed: " + e.what());
    }
  };

  std::optional<Mesh> mesh;
  wrap("build_mesh", [&] { mesh.emplace(build_mesh(c.domain, c.nodes)); });
  wrap("sample_damping", [&] { (void)sample_damping(*mesh, c.damping, c.require_assumption); });

  wrap("nonlinearity", [&] {
    const auto spec = c.nonlinearity_spec();
    const auto report = validate(spec, c.effective_admissibility_dimension(), c.admissibility);
    if (!report.admissible()) {
      std::string msg = "nonlinearity.validate rejected '" + c.nonlinearity + "':";
      for (const auto& f : report.failures()) msg += " " + f + ";";
      throw ConfigError("config: " + msg);
    }
    if (c.truncation_level && *c.truncation_level < 1) throw std::invalid_argument("truncation level k must be >= 1");
  });

  if (!(c.t_final > 0.0)) throw ConfigError("config: time.t_final must be positive");
  if (!(c.safety > 0.0)) throw ConfigError("config: time.safety must be positive");
  if (c.dt) {
    if (!(*c.dt > 0.0)) throw ConfigError("config: time.dt must be positive");
    const double limit = mesh->min_spacing() / std::sqrt(static_cast<double>(mesh->dimension()));
    if (*c.dt > limit)
      throw ConfigError("config: integrator precondition failed: dt = " + fmt(*c.dt) + " exceeds the CFL bound " +
                        fmt(limit));
  }

  for (int a = 0; a < 2; ++a)
    if (c.initial.shape[a] != "sin" && c.initial.shape[a] != "cos")
      throw ConfigError("config: initial.shape_" + std::string(a == 0 ? "x" : "y") + " must be sin or cos");
  if (!(c.initial.width > 0.0)) throw ConfigError("config: initial.width must be positive");

  if (!(c.horizon > 0.0)) throw ConfigError("config: analysis.horizon must be positive");
  if (c.mu_points > 1 && !(c.mu_max > c.mu_min)) throw ConfigError("config: analysis.mu_max must exceed mu_min");
  if (c.k_list.empty()) throw ConfigError("config: analysis.k_list is empty");
  for (std::size_t i = 0; i < c.k_list.size(); ++i) {
    if (c.k_list[i] < 1) throw ConfigError("config: analysis.k_list levels must be >= 1");
    if (i > 0 && c.k_list[i] <= c.k_list[i - 1]) throw ConfigError("config: analysis.k_list must ascend");
  }
  if (c.ray_origins < 8 || c.ray_directions < 8)
    throw ConfigError("config: control_time precondition failed: ray sampling counts must be >= 8");
  if (!(c.ray_t_max > 0.0)) throw ConfigError("config: analysis.ray_t_max must be positive");
  if (c.fit_start && c.fit_end && !(*c.fit_end > *c.fit_start))
    throw ConfigError("config: analysis.fit_end must exceed fit_start");
}

std::string render_config(const ExperimentConfig& c) {
  std::ostringstream os;
  auto interval = [](const Interval& i) { return fmt(i.lo) + " " + fmt(i.hi); };
  os << "[domain]\n";
  os << "dimension = " << c.domain.dimension << "\n";
  os << "x = " << interval(c.domain.extent[0]) << "\n";
  if (c.domain.dimension == 2) os << "y = " << interval(c.domain.extent[1]) << "\n";
  os << "diagnostic = " << (c.domain.diagnostic ? "true" : "false") << "\n\n";

  os << "[boundary]\n";
  for (Face face : faces_for(c.domain.dimension)) {
    os << to_string(face) << " = ";
    bool first = true;
    for (const auto& s : c.domain.partition.segments()) {
      if (s.face != face) continue;
      if (!first) os << ", ";
      first = false;
      os << to_string(s.condition);
      if (c.domain.dimension == 2) os << " " << interval(s.span);
    }
    os << "\n";
  }
  os << "\n[damping]\nregion = ";
  for (std::size_t b = 0; b < c.damping.region.size(); ++b) {
    if (b) os << "; ";
    for (std::size_t a = 0; a < c.damping.region[b].axes.size(); ++a) {
      if (a) os << " ";
      os << interval(c.damping.region[b].axes[a]);
    }
  }
  os << "\na0 = " << fmt(c.damping.a0) << "\n";
  os << "amplitude = " << fmt(c.damping.amplitude) << "\n";
  os << "profile = " << (c.damping.profile == DampingProfile::Indicator ? "indicator" : "smooth-bump") << "\n";
  os << "margin = " << fmt(c.damping.margin) << "\n";
  os << "require_assumption = " << (c.require_assumption ? "true" : "false") << "\n\n";

  os << "[nonlinearity]\nname = " << c.nonlinearity << "\n";
  os << "p = " << fmt(c.p) << "\n";
  os << "k = " << (c.truncation_level ? std::to_string(*c.truncation_level) : "none") << "\n";
  os << "mode = " << (c.admissibility == AdmissibilityMode::Existence ? "existence" : "uniqueness") << "\n";
  os << "dimension = " << c.effective_admissibility_dimension() << "\n\n";

  os << "[grid]\nnodes =";
  for (int n : c.nodes) os << " " << n;
  os << "\n\n[time]\nt_final = " << fmt(c.t_final) << "\n";
  os << "dt = " << (c.dt ? fmt(*c.dt) : "cfl") << "\n";
  os << "safety = " << fmt(c.safety) << "\n";
  os << "stride = " << c.stride << "\n\n";

  os << "[initial]\nkind = "
     << (c.initial.kind == InitialKind::Zero ? "zero" : c.initial.kind == InitialKind::Mode ? "mode" : "beam") << "\n";
  os << "amplitude = " << fmt(c.initial.amplitude) << "\n";
  os << "shape_x = " << c.initial.shape[0] << "\nshape_y = " << c.initial.shape[1] << "\n";
  os << "wavenumber_x = " << fmt(c.initial.wavenumber[0]) << "\nwavenumber_y = " << fmt(c.initial.wavenumber[1]) << "\n";
  os << "center = " << fmt(c.initial.center) << "\nwidth = " << fmt(c.initial.width) << "\n\n";

  os << "[analysis]\nensemble = " << c.ensemble << "\nseed = " << c.seed << "\nmodes = " << c.modes << "\n";
  os << "horizon = " << fmt(c.horizon) << "\n";
  os << "mu_min = " << fmt(c.mu_min) << "\nmu_max = " << fmt(c.mu_max) << "\nmu_points = " << c.mu_points << "\n";
  os << "k_list =";
  for (int k : c.k_list) os << " " << k;
  os << "\nfit_start = " << (c.fit_start ? fmt(*c.fit_start) : "t0") << "\n";
  os << "fit_end = " << (c.fit_end ? fmt(*c.fit_end) : "t_final") << "\n";
  os << "ray_origins = " << c.ray_origins << "\nray_directions = " << c.ray_directions << "\n";
  os << "ray_t_max = " << fmt(c.ray_t_max) << "\n";
  return os.str();
}

}  // namespace wavezar
