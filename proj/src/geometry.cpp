#include "wavezar/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wavezar {

namespace {

constexpr double kRelTol = 1e-9;

bool same(double a, double b, double scale) { return std::abs(a - b) <= 1e-12 * std::max(1.0, scale); }

int face_axis(Face face) { return (face == Face::Left || face == Face::Right) ? 0 : 1; }

// Cubic smoothstep roll-off: 1 at r <= 0, 0 at r >= 1, C1 in between.
double rolloff(double r) {
  if (r <= 0.0) return 1.0;
  if (r >= 1.0) return 0.0;
  return 1.0 - r * r * (3.0 - 2.0 * r);
}

}  // namespace

bool Box::contains(std::span<const double> p, double tol) const {
  for (std::size_t a = 0; a < axes.size(); ++a)
    if (!axes[a].contains(p[a], tol)) return false;
  return true;
}

std::string to_string(Face face) {
  switch (face) {
    case Face::Left: return "left";
    case Face::Right: return "right";
    case Face::Bottom: return "bottom";
    case Face::Top: return "top";
  }
  return "?";
}

std::string to_string(BoundaryCondition bc) { return bc == BoundaryCondition::Dirichlet ? "dirichlet" : "neumann"; }

std::string to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Interior: return "interior";
    case NodeKind::Dirichlet: return "dirichlet";
    case NodeKind::Neumann: return "neumann";
    case NodeKind::Junction: return "junction";
  }
  return "?";
}

std::optional<Face> face_from_string(const std::string& name) {
  if (name == "left") return Face::Left;
  if (name == "right") return Face::Right;
  if (name == "bottom") return Face::Bottom;
  if (name == "top") return Face::Top;
  return std::nullopt;
}

std::optional<BoundaryCondition> condition_from_string(const std::string& name) {
  if (name == "dirichlet") return BoundaryCondition::Dirichlet;
  if (name == "neumann") return BoundaryCondition::Neumann;
  return std::nullopt;
}

std::vector<Face> faces_for(int dimension) {
  if (dimension == 1) return {Face::Left, Face::Right};
  return {Face::Left, Face::Right, Face::Bottom, Face::Top};
}

BoundaryLookup BoundaryPartition::lookup(Face face, double param, double tol) const {
  BoundaryLookup out;
  for (const auto& s : segments_) {
    if (s.face != face) continue;
    if (!s.span.contains(param, tol)) continue;
    if (s.condition == BoundaryCondition::Dirichlet)
      out.dirichlet = true;
    else
      out.neumann = true;
  }
  return out;
}

bool BoundaryPartition::has(BoundaryCondition bc) const {
  return std::any_of(segments_.begin(), segments_.end(), [bc](const auto& s) { return s.condition == bc; });
}

double DomainSpec::diameter() const {
  double sq = 0.0;
  for (const auto& e : extent) sq += e.length() * e.length();
  return std::sqrt(sq);
}

void DomainSpec::validate() const {
  if (dimension != 1 && dimension != 2)
    throw std::invalid_argument("geometry: dimension must be 1 or 2, got " + std::to_string(dimension));
  if (static_cast<int>(extent.size()) != dimension)
    throw std::invalid_argument("geometry: dimension " + std::to_string(dimension) + " needs " +
                                std::to_string(dimension) + " extents, got " + std::to_string(extent.size()));
  for (const auto& e : extent)
    if (!(e.lo < e.hi)) throw std::invalid_argument("geometry: extent bounds must satisfy lo < hi");

  for (const auto& s : partition.segments()) {
    if (dimension == 1 && face_axis(s.face) != 0)
      throw std::invalid_argument("geometry: face '" + to_string(s.face) + "' does not exist in 1D");
  }

  for (Face face : faces_for(dimension)) {
    std::vector<BoundarySegment> on_face;
    for (const auto& s : partition.segments())
      if (s.face == face) on_face.push_back(s);
    if (on_face.empty())
      throw std::invalid_argument("geometry: boundary partition leaves face '" + to_string(face) + "' uncovered");
    if (dimension == 1) {
      if (on_face.size() != 1)
        throw std::invalid_argument("geometry: 1D face '" + to_string(face) + "' must carry exactly one condition");
      continue;
    }
    const Interval along = extent[1 - face_axis(face)];
    std::sort(on_face.begin(), on_face.end(), [](const auto& a, const auto& b) { return a.span.lo < b.span.lo; });
    const double scale = along.length();
    double reach = along.lo;
    for (const auto& s : on_face) {
      if (!(s.span.lo < s.span.hi))
        throw std::invalid_argument("geometry: empty segment on face '" + to_string(face) + "'");
      if (s.span.lo > reach && !same(s.span.lo, reach, scale))
        throw std::invalid_argument("geometry: boundary partition leaves a gap on face '" + to_string(face) + "'");
      if (s.span.lo < reach && !same(s.span.lo, reach, scale))
        throw std::invalid_argument("geometry: overlapping segments on face '" + to_string(face) + "'");
      reach = s.span.hi;
    }
    if (!same(reach, along.hi, scale))
      throw std::invalid_argument("geometry: boundary partition leaves face '" + to_string(face) + "' uncovered");
  }

  if (!diagnostic) {
    if (!partition.has(BoundaryCondition::Dirichlet) || !partition.has(BoundaryCondition::Neumann))
      throw std::invalid_argument(
          "geometry: a mixed problem needs both a Dirichlet and a Neumann part of the boundary "
          "(set diagnostic mode for pure test problems)");
  }
}

Mesh::Mesh(DomainSpec domain, std::vector<int> counts) : domain_(std::move(domain)), counts_(std::move(counts)) {
  domain_.validate();
  if (static_cast<int>(counts_.size()) != domain_.dimension)
    throw std::invalid_argument("geometry: need one node count per axis");
  for (int c : counts_)
    if (c < 3) throw std::invalid_argument("geometry: at least 3 nodes per axis are required, got " + std::to_string(c));
  for (int a = 0; a < domain_.dimension; ++a) spacing_.push_back(domain_.extent[a].length() / (counts_[a] - 1));
  std::size_t total = 1;
  for (int c : counts_) total *= static_cast<std::size_t>(c);
  kinds_.assign(total, NodeKind::Interior);
  classify();
}

double Mesh::min_spacing() const { return *std::min_element(spacing_.begin(), spacing_.end()); }

std::array<int, 2> Mesh::multi_index(std::size_t node) const {
  const int n = static_cast<int>(node);
  if (dimension() == 1) return {n, 0};
  return {n % counts_[0], n / counts_[0]};
}

double Mesh::coordinate(std::size_t node, int axis) const {
  const auto idx = multi_index(node);
  const int i = idx[axis];
  if (i == counts_[axis] - 1) return domain_.extent[axis].hi;
  return domain_.extent[axis].lo + i * spacing_[axis];
}

std::array<double, 2> Mesh::point(std::size_t node) const {
  return {coordinate(node, 0), dimension() == 2 ? coordinate(node, 1) : 0.0};
}

bool Mesh::on_boundary(std::size_t node, int axis) const {
  const auto idx = multi_index(node);
  return idx[axis] == 0 || idx[axis] == counts_[axis] - 1;
}

double Mesh::quadrature_weight(std::size_t node) const {
  double w = 1.0;
  for (int a = 0; a < dimension(); ++a) w *= on_boundary(node, a) ? 0.5 * spacing_[a] : spacing_[a];
  return w;
}

void Mesh::classify() {
  const int dim = dimension();
  for (std::size_t node = 0; node < kinds_.size(); ++node) {
    const auto idx = multi_index(node);
    BoundaryLookup acc;
    for (int axis = 0; axis < dim; ++axis) {
      if (idx[axis] != 0 && idx[axis] != counts_[axis] - 1) continue;
      const bool lo_side = idx[axis] == 0;
      const Face face = axis == 0 ? (lo_side ? Face::Left : Face::Right) : (lo_side ? Face::Bottom : Face::Top);
      double param = 0.0;
      double tol = 0.0;
      if (dim == 2) {
        const int other = 1 - axis;
        param = coordinate(node, other);
        tol = kRelTol * spacing_[other];
      }
      const auto hit = domain_.partition.lookup(face, param, tol);
      acc.dirichlet = acc.dirichlet || hit.dirichlet;
      acc.neumann = acc.neumann || hit.neumann;
    }
    if (acc.junction())
      kinds_[node] = NodeKind::Junction;
    else if (acc.dirichlet)
      kinds_[node] = NodeKind::Dirichlet;
    else if (acc.neumann)
      kinds_[node] = NodeKind::Neumann;
  }
  dof_of_node_.assign(kinds_.size(), -1);
  for (std::size_t node = 0; node < kinds_.size(); ++node) {
    if (constrained(node)) continue;
    dof_of_node_[node] = static_cast<long>(free_nodes_.size());
    free_nodes_.push_back(node);
  }
}

Mesh build_mesh(const DomainSpec& domain, const std::vector<int>& nodes_per_axis) { return Mesh(domain, nodes_per_axis); }

double DampingField::max() const { return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end()); }

double DampingField::min_over_region(const Mesh& mesh) const {
  const auto inside = region_indicator(mesh, region);
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < values.size(); ++n)
    if (inside[n] > 0.0) m = std::min(m, values[n]);
  return m;
}

std::vector<double> region_indicator(const Mesh& mesh, const std::vector<Box>& region) {
  std::vector<double> out(mesh.node_count(), 0.0);
  const double tol = kRelTol * mesh.min_spacing();
  for (std::size_t n = 0; n < out.size(); ++n) {
    const auto p = mesh.point(n);
    for (const auto& box : region)
      if (box.contains(std::span<const double>(p.data(), box.dimension()), tol)) {
        out[n] = 1.0;
        break;
      }
  }
  return out;
}

DampingField sample_damping(const Mesh& mesh, const DampingSpec& spec, bool require_positive_floor) {
  const int dim = mesh.dimension();
  const Box domain = mesh.domain().as_box();
  const double tol = kRelTol * mesh.min_spacing();
  if (spec.region.empty()) throw std::invalid_argument("sample_damping: damping region is empty");
  for (const auto& box : spec.region) {
    if (static_cast<int>(box.dimension()) != dim)
      throw std::invalid_argument("sample_damping: region box dimension does not match the domain");
    for (int a = 0; a < dim; ++a) {
      const auto& iv = box.axes[a];
      if (!(iv.lo < iv.hi)) throw std::invalid_argument("sample_damping: region box bounds must satisfy lo < hi");
      if (!domain.axes[a].contains(iv.lo, tol) || !domain.axes[a].contains(iv.hi, tol))
        throw std::invalid_argument("sample_damping: damping region lies outside the domain");
    }
  }
  if (spec.a0 < 0.0) throw std::invalid_argument("sample_damping: damping coefficient must be nonnegative");
  if (spec.amplitude < 1.0)
    throw std::invalid_argument("sample_damping: amplitude factor below 1 would drop the field under a0 on the region");
  if (require_positive_floor && spec.a0 <= 0.0)
    throw std::invalid_argument("sample_damping: a0 must be positive on the damping region");
  if (spec.profile == DampingProfile::SmoothBump && !(spec.margin > 0.0))
    throw std::invalid_argument("sample_damping: smooth-bump margin must be positive");

  DampingField field;
  field.region = spec.region;
  field.a0 = spec.a0;
  field.profile = spec.profile;
  field.assumption_satisfied = spec.a0 > 0.0;
  field.values.assign(mesh.node_count(), 0.0);
  const double peak = spec.a0 * spec.amplitude;

  if (spec.profile == DampingProfile::Indicator) {
    const auto inside = region_indicator(mesh, spec.region);
    for (std::size_t n = 0; n < inside.size(); ++n) field.values[n] = peak * inside[n];
    return field;
  }

  for (std::size_t n = 0; n < mesh.node_count(); ++n) {
    const auto p = mesh.point(n);
    double best = 0.0;
    for (const auto& box : spec.region) {
      double v = 1.0;
      for (int a = 0; a < dim; ++a) {
        const auto& iv = box.axes[a];
        double outside = 0.0;
        if (p[a] < iv.lo - tol) outside = iv.lo - p[a];
        if (p[a] > iv.hi + tol) outside = p[a] - iv.hi;
        v *= rolloff(outside / spec.margin);
      }
      best = std::max(best, v);
    }
    field.values[n] = peak * best;
  }
  return field;
}

}  // namespace wavezar
