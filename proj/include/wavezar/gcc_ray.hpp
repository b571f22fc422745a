#pragma once

#include <array>
#include <optional>
#include <vector>

#include "wavezar/geometry.hpp"

namespace wavezar {

using Vec2 = std::array<double, 2>;

struct RayEvent {
  double t = 0.0;
  Vec2 point{};
  /// Direction leaving this event.
  Vec2 direction{};
};

/// Unit-speed billiard path in the domain rectangle (or interval).  `path`
/// starts at t = 0 and ends at t = horizon; intermediate events are specular
/// reflections.  The second coordinate is unused in 1D.
struct Ray {
  int dimension = 1;
  Vec2 origin{};
  Vec2 direction{};
  double horizon = 0.0;
  std::vector<RayEvent> path;

  /// Position at time t in [0, horizon].
  Vec2 position(double t) const;
};

/// Exact piecewise-linear billiard flow; corner hits reverse both components.
/// Throws std::invalid_argument for t_max <= 0, an origin outside the closed
/// domain, or a non-unit direction.
Ray trace_ray(const DomainSpec& domain, Vec2 origin, Vec2 direction, double t_max);

/// First time the path is inside the open region (the infimum of such times),
/// or nullopt when that never happens before the horizon.
std::optional<double> first_entry_time(const Ray& ray, const std::vector<Box>& region);

/// Smallest distance between the path and the region (0 if it enters).
double clearance(const Ray& ray, const std::vector<Box>& region);

struct RaySampling {
  int origins_per_axis = 32;
  int directions = 64;
  double t_max = 20.0;
};

struct GCCReport {
  bool satisfied = false;
  /// max sampled entry time times 1.05 (set only when satisfied).
  std::optional<double> t0_estimate;
  /// Max sampled entry time before the margin (set only when satisfied).
  std::optional<double> worst_entry_time;
  /// Latest-entering ray when satisfied; otherwise a trapped ray that keeps the
  /// largest distance from the region.
  Ray worst_ray;
  std::optional<double> worst_ray_entry;
  RaySampling sampling;
  std::size_t rays_traced = 0;
  std::size_t rays_missing = 0;
};

inline constexpr double kControlTimeMargin = 1.05;

/// Samples origins on a uniform grid of the closed domain and directions
/// uniformly on the circle (just +-1 in 1D).  The region is taken open
/// relative to the closed domain, so box faces on the boundary are inclusive.
/// Throws for counts below 8.
GCCReport control_time(const DomainSpec& domain, const std::vector<Box>& region, const RaySampling& sampling);

}  // namespace wavezar
