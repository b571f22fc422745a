#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wavezar {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  double length() const { return hi - lo; }
  bool contains(double x, double tol = 0.0) const { return x >= lo - tol && x <= hi + tol; }
};

/// Axis-aligned box with one interval per axis (1 or 2 axes).
struct Box {
  std::vector<Interval> axes;

  std::size_t dimension() const { return axes.size(); }
  bool contains(std::span<const double> p, double tol = 0.0) const;
};

enum class BoundaryCondition { Dirichlet, Neumann };

/// Faces of the reference rectangle.  Left/Right are x = lo/hi; Bottom/Top are
/// y = lo/hi (2D only).  In 1D only Left and Right exist and are single points.
enum class Face { Left, Right, Bottom, Top };

std::string to_string(Face face);
std::string to_string(BoundaryCondition bc);
std::optional<Face> face_from_string(const std::string& name);
std::optional<BoundaryCondition> condition_from_string(const std::string& name);

/// One piece of a face.  `span` is measured in the coordinate running along
/// the face (y for Left/Right, x for Bottom/Top) and is ignored in 1D.
struct BoundarySegment {
  Face face;
  Interval span;
  BoundaryCondition condition;
};

/// Result of looking up the condition at a boundary point.  A point touched by
/// both a Dirichlet and a Neumann segment is a junction.
struct BoundaryLookup {
  bool dirichlet = false;
  bool neumann = false;

  bool junction() const { return dirichlet && neumann; }
};

class BoundaryPartition {
 public:
  BoundaryPartition() = default;
  explicit BoundaryPartition(std::vector<BoundarySegment> segments) : segments_(std::move(segments)) {}

  const std::vector<BoundarySegment>& segments() const { return segments_; }

  /// Conditions of all segments of `face` whose closed span contains `param`.
  BoundaryLookup lookup(Face face, double param, double tol) const;

  bool has(BoundaryCondition bc) const;

 private:
  std::vector<BoundarySegment> segments_;
};

struct DomainSpec {
  int dimension = 1;
  std::vector<Interval> extent;
  BoundaryPartition partition;
  /// Allows partitions without both a Dirichlet and a Neumann part (pure
  /// Neumann or pure Dirichlet test problems).
  bool diagnostic = false;

  /// Throws std::invalid_argument on ordering, coverage or Zaremba violations.
  void validate() const;
  Box as_box() const { return Box{extent}; }
  double diameter() const;
};

/// Faces present for a dimension, in canonical order.
std::vector<Face> faces_for(int dimension);

enum class NodeKind { Interior, Dirichlet, Neumann, Junction };

std::string to_string(NodeKind kind);

/// Uniform tensor grid on a DomainSpec.  Node index is i + nx * j.
class Mesh {
 public:
  Mesh(DomainSpec domain, std::vector<int> counts);

  const DomainSpec& domain() const { return domain_; }
  int dimension() const { return domain_.dimension; }
  const std::vector<int>& counts() const { return counts_; }
  const std::vector<double>& spacing() const { return spacing_; }
  double min_spacing() const;
  std::size_t node_count() const { return kinds_.size(); }

  std::array<int, 2> multi_index(std::size_t node) const;
  std::size_t node_index(int i, int j = 0) const { return static_cast<std::size_t>(i + counts_[0] * j); }
  double coordinate(std::size_t node, int axis) const;
  std::array<double, 2> point(std::size_t node) const;

  NodeKind kind(std::size_t node) const { return kinds_[node]; }
  const std::vector<NodeKind>& kinds() const { return kinds_; }

  /// Junction nodes carry the Dirichlet constraint.
  bool constrained(std::size_t node) const {
    return kinds_[node] == NodeKind::Dirichlet || kinds_[node] == NodeKind::Junction;
  }
  /// True when the node lies on the lo or hi face of `axis`.
  bool on_boundary(std::size_t node, int axis) const;

  /// Free (unconstrained) nodes in increasing node order.
  const std::vector<std::size_t>& free_nodes() const { return free_nodes_; }
  /// Degree-of-freedom index of a node, or -1 for constrained nodes.
  long dof(std::size_t node) const { return dof_of_node_[node]; }
  std::size_t dof_count() const { return free_nodes_.size(); }

  /// Tensor trapezoid weights (cell volume times 1/2 per boundary axis).
  double quadrature_weight(std::size_t node) const;

 private:
  void classify();

  DomainSpec domain_;
  std::vector<int> counts_;
  std::vector<double> spacing_;
  std::vector<NodeKind> kinds_;
  std::vector<std::size_t> free_nodes_;
  std::vector<long> dof_of_node_;
};

Mesh build_mesh(const DomainSpec& domain, const std::vector<int>& nodes_per_axis);

enum class DampingProfile { Indicator, SmoothBump };

struct DampingSpec {
  std::vector<Box> region;
  double a0 = 1.0;
  double amplitude = 1.0;
  DampingProfile profile = DampingProfile::Indicator;
  /// Width of the C1 roll-off outside the region (smooth-bump only).
  double margin = 0.1;
};

struct DampingField {
  std::vector<double> values;  // per node
  std::vector<Box> region;
  double a0 = 0.0;
  DampingProfile profile = DampingProfile::Indicator;
  /// False when a0 == 0, i.e. no positive lower bound on the region.
  bool assumption_satisfied = true;

  double max() const;
  double min_over_region(const Mesh& mesh) const;
};

/// Samples a(x) on the mesh nodes.  When `require_positive_floor` is set,
/// a0 <= 0 is rejected; otherwise a0 == 0 yields a flagged field.
DampingField sample_damping(const Mesh& mesh, const DampingSpec& spec, bool require_positive_floor = true);

/// Indicator of the region on the nodes (1 inside, 0 outside).
std::vector<double> region_indicator(const Mesh& mesh, const std::vector<Box>& region);

}  // namespace wavezar
