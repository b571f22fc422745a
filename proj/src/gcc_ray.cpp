#include "wavezar/gcc_ray.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "wavezar/support.hpp"

namespace wavezar {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double box_distance(const Vec2& p, const Box& box) {
  double sq = 0.0;
  for (std::size_t a = 0; a < box.dimension(); ++a) {
    const double below = box.axes[a].lo - p[a];
    const double above = p[a] - box.axes[a].hi;
    const double d = std::max({below, above, 0.0});
    sq += d * d;
  }
  return std::sqrt(sq);
}

// Open-box hit on the segment p + s d, s in [0, len]; returns the entry s.
std::optional<double> segment_entry(const Vec2& p, const Vec2& d, double len, const Box& box) {
  double s_in = -kInf;
  double s_out = kInf;
  for (std::size_t a = 0; a < box.dimension(); ++a) {
    const double lo = box.axes[a].lo;
    const double hi = box.axes[a].hi;
    if (d[a] == 0.0) {
      if (!(p[a] > lo && p[a] < hi)) return std::nullopt;
      continue;
    }
    double s0 = (lo - p[a]) / d[a];
    double s1 = (hi - p[a]) / d[a];
    if (s0 > s1) std::swap(s0, s1);
    s_in = std::max(s_in, s0);
    s_out = std::min(s_out, s1);
  }
  const double lo_s = std::max(s_in, 0.0);
  const double hi_s = std::min(s_out, len);
  if (lo_s < hi_s) return lo_s;
  return std::nullopt;
}

}  // namespace

Vec2 Ray::position(double t) const {
  if (path.empty()) return origin;
  auto it = std::upper_bound(path.begin(), path.end(), t, [](double x, const RayEvent& e) { return x < e.t; });
  const RayEvent& e = it == path.begin() ? path.front() : *(it - 1);
  const double s = t - e.t;
  return {e.point[0] + s * e.direction[0], e.point[1] + s * e.direction[1]};
}

Ray trace_ray(const DomainSpec& domain, Vec2 origin, Vec2 direction, double t_max) {
  if (!(t_max > 0.0)) throw std::invalid_argument("trace_ray: t_max must be positive");
  const int dim = domain.dimension;
  if (dim == 1) {
    origin[1] = 0.0;
    direction[1] = 0.0;
  }
  const double norm = std::hypot(direction[0], direction[1]);
  if (std::abs(norm - 1.0) > 1e-12) throw std::invalid_argument("trace_ray: direction must be a unit vector");
  const double tol = 1e-12 * std::max(1.0, domain.diameter());
  for (int a = 0; a < dim; ++a)
    if (!domain.extent[a].contains(origin[a], tol)) throw std::invalid_argument("trace_ray: origin outside the domain");

  Ray ray;
  ray.dimension = dim;
  ray.origin = origin;
  ray.direction = direction;
  ray.horizon = t_max;

  Vec2 p = origin;
  Vec2 d = direction;
  double t = 0.0;
  ray.path.push_back({0.0, p, d});
  while (true) {
    std::array<double, 2> hit{kInf, kInf};
    for (int a = 0; a < dim; ++a) {
      if (d[a] > 0.0) hit[a] = (domain.extent[a].hi - p[a]) / d[a];
      if (d[a] < 0.0) hit[a] = (domain.extent[a].lo - p[a]) / d[a];
      hit[a] = std::max(hit[a], 0.0);
    }
    const double tau = std::min(hit[0], hit[1]);
    if (t + tau >= t_max) {
      const double s = t_max - t;
      ray.path.push_back({t_max, {p[0] + s * d[0], p[1] + s * d[1]}, d});
      break;
    }
    for (int a = 0; a < dim; ++a) p[a] += tau * d[a];
    t += tau;
    for (int a = 0; a < dim; ++a) {
      if (hit[a] - tau <= 1e-12 * (1.0 + tau)) {
        p[a] = d[a] > 0.0 ? domain.extent[a].hi : domain.extent[a].lo;
        d[a] = -d[a];
      }
    }
    ray.path.push_back({t, p, d});
  }
  return ray;
}

std::optional<double> first_entry_time(const Ray& ray, const std::vector<Box>& region) {
  for (std::size_t i = 0; i + 1 < ray.path.size(); ++i) {
    const auto& e = ray.path[i];
    const double len = ray.path[i + 1].t - e.t;
    std::optional<double> best;
    for (const auto& box : region) {
      const auto s = segment_entry(e.point, e.direction, len, box);
      if (s && (!best || *s < *best)) best = s;
    }
    if (best) return e.t + *best;
  }
  return std::nullopt;
}

double clearance(const Ray& ray, const std::vector<Box>& region) {
  if (first_entry_time(ray, region)) return 0.0;
  double best = kInf;
  for (std::size_t i = 0; i + 1 < ray.path.size(); ++i) {
    const auto& e = ray.path[i];
    const double len = ray.path[i + 1].t - e.t;
    for (const auto& box : region) {
      auto dist = [&](double s) { return box_distance({e.point[0] + s * e.direction[0], e.point[1] + s * e.direction[1]}, box); };
      // Distance to a convex set is convex along a segment.
      double a = 0.0;
      double b = len;
      for (int it = 0; it < 100; ++it) {
        const double m1 = a + (b - a) / 3.0;
        const double m2 = b - (b - a) / 3.0;
        if (dist(m1) <= dist(m2))
          b = m2;
        else
          a = m1;
      }
      best = std::min({best, dist(0.0), dist(len), dist(0.5 * (a + b))});
    }
  }
  return best;
}

namespace {

// omega is open relative to the closed domain: faces lying on the domain
// boundary are pushed outward so boundary points count as inside.
std::vector<Box> relative_region(const DomainSpec& domain, const std::vector<Box>& region) {
  std::vector<Box> out = region;
  const double pad = domain.diameter();
  for (auto& box : out)
    for (std::size_t a = 0; a < box.axes.size() && a < domain.extent.size(); ++a) {
      const auto& e = domain.extent[a];
      const double tol = 1e-12 * (1.0 + e.length());
      if (std::abs(box.axes[a].lo - e.lo) <= tol) box.axes[a].lo = e.lo - pad;
      if (std::abs(box.axes[a].hi - e.hi) <= tol) box.axes[a].hi = e.hi + pad;
    }
  return out;
}

}  // namespace

GCCReport control_time(const DomainSpec& domain, const std::vector<Box>& omega, const RaySampling& sampling) {
  if (sampling.origins_per_axis < 8 || sampling.directions < 8)
    throw std::invalid_argument("control_time: sampling counts must be >= 8");
  if (!(sampling.t_max > 0.0)) throw std::invalid_argument("control_time: t_max must be positive");
  const int dim = domain.dimension;
  const std::vector<Box> region = relative_region(domain, omega);

  std::vector<Vec2> origins;
  const int n = sampling.origins_per_axis;
  auto coord = [&](int axis, int i) {
    const auto& e = domain.extent[axis];
    return i == n - 1 ? e.hi : e.lo + e.length() * i / (n - 1);
  };
  if (dim == 1) {
    for (int i = 0; i < n; ++i) origins.push_back({coord(0, i), 0.0});
  } else {
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) origins.push_back({coord(0, i), coord(1, j)});
  }
  std::vector<Vec2> directions;
  if (dim == 1) {
    directions = {{1.0, 0.0}, {-1.0, 0.0}};
  } else {
    for (int k = 0; k < sampling.directions; ++k) {
      const double th = 2.0 * std::numbers::pi * k / sampling.directions;
      Vec2 d{std::cos(th), std::sin(th)};
      for (double& c : d)
        if (std::abs(c) < 1e-15) c = 0.0;
      directions.push_back(d);
    }
  }

  const std::size_t total = origins.size() * directions.size();
  std::vector<std::optional<double>> entries(total);
  parallel_for(total, [&](std::size_t idx) {
    const Ray ray = trace_ray(domain, origins[idx / directions.size()], directions[idx % directions.size()], sampling.t_max);
    entries[idx] = first_entry_time(ray, region);
  });

  GCCReport report;
  report.sampling = sampling;
  report.rays_traced = total;
  std::vector<std::size_t> missing;
  std::size_t worst = 0;
  double worst_time = -1.0;
  for (std::size_t idx = 0; idx < total; ++idx) {
    if (!entries[idx]) {
      missing.push_back(idx);
      continue;
    }
    if (*entries[idx] > worst_time) {
      worst_time = *entries[idx];
      worst = idx;
    }
  }
  report.rays_missing = missing.size();
  report.satisfied = missing.empty();
  if (report.satisfied) {
    report.worst_entry_time = worst_time;
    report.t0_estimate = worst_time * kControlTimeMargin;
    report.worst_ray_entry = worst_time;
  } else {
    std::vector<double> gaps(missing.size());
    parallel_for(missing.size(), [&](std::size_t m) {
      const std::size_t idx = missing[m];
      gaps[m] = clearance(trace_ray(domain, origins[idx / directions.size()], directions[idx % directions.size()],
                                    sampling.t_max),
                          region);
    });
    std::size_t pick = 0;
    for (std::size_t m = 1; m < missing.size(); ++m)
      if (gaps[m] > gaps[pick]) pick = m;
    worst = missing[pick];
  }
  report.worst_ray =
      trace_ray(domain, origins[worst / directions.size()], directions[worst % directions.size()], sampling.t_max);
  return report;
}

}  // namespace wavezar
