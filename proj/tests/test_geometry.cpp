#include "doctest.h"
#include "helpers.hpp"

#include <cmath>
#include <stdexcept>

using namespace wavezar;

TEST_CASE("uniform 1D grid with five nodes") {
  const Mesh mesh = build_mesh(th::mixed_interval(), {5});
  CHECK(mesh.spacing()[0] == doctest::Approx(0.25));
  const double expected[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  for (std::size_t n = 0; n < 5; ++n) CHECK(mesh.coordinate(n, 0) == expected[n]);
  CHECK(mesh.kind(0) == NodeKind::Dirichlet);
  CHECK(mesh.kind(4) == NodeKind::Neumann);
  for (std::size_t n = 1; n < 4; ++n) CHECK(mesh.kind(n) == NodeKind::Interior);
  CHECK(mesh.dof_count() == 4);
  CHECK(mesh.dof(0) == -1);
}

TEST_CASE("3x3 square has nine nodes and one interior node") {
  const Mesh mesh = build_mesh(th::square(), {3, 3});
  CHECK(mesh.node_count() == 9);
  int interior = 0;
  for (auto k : mesh.kinds()) interior += k == NodeKind::Interior;
  CHECK(interior == 1);
}

TEST_CASE("corners where Dirichlet meets Neumann are junctions and constrained") {
  const Mesh mesh = build_mesh(th::square(), {5, 5});
  for (std::size_t corner : {mesh.node_index(0, 0), mesh.node_index(4, 0), mesh.node_index(0, 4), mesh.node_index(4, 4)}) {
    CHECK(mesh.kind(corner) == NodeKind::Junction);
    CHECK(mesh.constrained(corner));
  }
  CHECK(mesh.kind(mesh.node_index(0, 2)) == NodeKind::Neumann);
  CHECK(mesh.kind(mesh.node_index(2, 0)) == NodeKind::Dirichlet);
}

TEST_CASE("junction inside a face") {
  DomainSpec d = th::square();
  d.partition = BoundaryPartition({{Face::Left, {0, 0.5}, BoundaryCondition::Dirichlet},
                                   {Face::Left, {0.5, 1}, BoundaryCondition::Neumann},
                                   {Face::Right, {0, 1}, BoundaryCondition::Neumann},
                                   {Face::Bottom, {0, 1}, BoundaryCondition::Neumann},
                                   {Face::Top, {0, 1}, BoundaryCondition::Neumann}});
  const Mesh mesh = build_mesh(d, {5, 5});
  CHECK(mesh.kind(mesh.node_index(0, 1)) == NodeKind::Dirichlet);
  CHECK(mesh.kind(mesh.node_index(0, 2)) == NodeKind::Junction);
  CHECK(mesh.kind(mesh.node_index(0, 3)) == NodeKind::Neumann);
  CHECK(mesh.kind(mesh.node_index(0, 0)) == NodeKind::Junction);
}

TEST_CASE("mesh preconditions") {
  CHECK_THROWS_AS(build_mesh(th::mixed_interval(), {2}), std::invalid_argument);
  DomainSpec gap = th::square();
  gap.partition = BoundaryPartition({{Face::Left, {0, 0.4}, BoundaryCondition::Dirichlet},
                                     {Face::Right, {0, 1}, BoundaryCondition::Neumann},
                                     {Face::Bottom, {0, 1}, BoundaryCondition::Dirichlet},
                                     {Face::Top, {0, 1}, BoundaryCondition::Dirichlet}});
  CHECK_THROWS_AS(build_mesh(gap, {5, 5}), std::invalid_argument);
  DomainSpec overlap = th::square();
  overlap.partition = BoundaryPartition({{Face::Left, {0, 0.6}, BoundaryCondition::Dirichlet},
                                         {Face::Left, {0.4, 1}, BoundaryCondition::Neumann},
                                         {Face::Right, {0, 1}, BoundaryCondition::Neumann},
                                         {Face::Bottom, {0, 1}, BoundaryCondition::Dirichlet},
                                         {Face::Top, {0, 1}, BoundaryCondition::Dirichlet}});
  CHECK_THROWS_AS(build_mesh(overlap, {5, 5}), std::invalid_argument);
  // no Neumann part
  CHECK_THROWS_AS(build_mesh(th::interval(BoundaryCondition::Dirichlet, BoundaryCondition::Dirichlet), {5}),
                  std::invalid_argument);
  CHECK_NOTHROW(build_mesh(th::interval(BoundaryCondition::Dirichlet, BoundaryCondition::Dirichlet, true), {5}));
  DomainSpec reversed = th::mixed_interval();
  reversed.extent = {{1.0, 0.0}};
  CHECK_THROWS_AS(build_mesh(reversed, {5}), std::invalid_argument);
  DomainSpec wrong = th::mixed_interval();
  wrong.dimension = 2;
  CHECK_THROWS(build_mesh(wrong, {5, 5}));
}

TEST_CASE("indicator damping on 11 nodes") {
  const Mesh mesh = build_mesh(th::mixed_interval(), {11});
  const DampingField a = sample_damping(mesh, th::damping(th::box1(0.4, 0.6)));
  for (std::size_t n = 0; n < 11; ++n) {
    const bool inside = n >= 4 && n <= 6;
    CHECK(a.values[n] == (inside ? 1.0 : 0.0));
  }
  CHECK(a.assumption_satisfied);
}

TEST_CASE("amplitude factor multiplies the floor") {
  const Mesh mesh = build_mesh(th::mixed_interval(), {11});
  DampingSpec s = th::damping(th::box1(0.4, 0.6), 0.5);
  s.amplitude = 3.0;
  const DampingField a = sample_damping(mesh, s);
  CHECK(a.values[5] == doctest::Approx(1.5));
  CHECK(a.max() == doctest::Approx(1.5));
  s.amplitude = 0.5;
  CHECK_THROWS_AS(sample_damping(mesh, s), std::invalid_argument);
}

TEST_CASE("zero floor is flagged, or rejected when required") {
  const Mesh mesh = build_mesh(th::mixed_interval(), {11});
  const auto spec = th::damping(th::box1(0.4, 0.6), 0.0);
  const DampingField a = sample_damping(mesh, spec, false);
  CHECK_FALSE(a.assumption_satisfied);
  for (double v : a.values) CHECK(v == 0.0);
  CHECK_THROWS_AS(sample_damping(mesh, spec, true), std::invalid_argument);
  CHECK_THROWS_AS(sample_damping(mesh, th::damping(th::box1(0.4, 0.6), -1.0), false), std::invalid_argument);
}

TEST_CASE("region outside the domain is rejected") {
  const Mesh mesh = build_mesh(th::mixed_interval(), {11});
  CHECK_THROWS_AS(sample_damping(mesh, th::damping(th::box1(0.8, 1.2))), std::invalid_argument);
}

TEST_CASE("smooth bump keeps the floor on the region") {
  const Mesh mesh = build_mesh(th::mixed_interval(), {201});
  DampingSpec s = th::damping(th::box1(0.25, 0.75));
  s.profile = DampingProfile::SmoothBump;
  s.margin = 0.1;
  const DampingField a = sample_damping(mesh, s);
  CHECK(a.min_over_region(mesh) >= 1.0);
  // roll-off: positive inside the margin, zero beyond it
  CHECK(a.values[40] > 0.0);   // x = 0.2
  CHECK(a.values[40] < 1.0);
  CHECK(a.values[20] == 0.0);  // x = 0.1
  for (double v : a.values) CHECK(v >= 0.0);
}

TEST_CASE("smooth bump is C1: difference quotients stay bounded under refinement") {
  DampingSpec s = th::damping(th::box1(0.25, 0.75));
  s.profile = DampingProfile::SmoothBump;
  s.margin = 0.1;
  double prev_jump = 1e9;
  for (int nodes : {401, 801, 1601}) {
    const Mesh mesh = build_mesh(th::mixed_interval(), {nodes});
    const DampingField a = sample_damping(mesh, s);
    const double h = mesh.spacing()[0];
    double jump = 0.0;  // largest change of the slope between neighbouring cells
    for (int i = 1; i + 1 < nodes; ++i) {
      const double left = (a.values[i] - a.values[i - 1]) / h;
      const double right = (a.values[i + 1] - a.values[i]) / h;
      jump = std::max(jump, std::abs(right - left));
    }
    CHECK(jump < prev_jump);
    prev_jump = jump;
  }
}

TEST_CASE("node classification partitions the node set") {
  for (auto counts : std::vector<std::vector<int>>{{3, 3}, {7, 5}, {16, 9}}) {
    const Mesh mesh = build_mesh(th::square(), counts);
    std::size_t total = 0;
    for (auto kind : {NodeKind::Interior, NodeKind::Dirichlet, NodeKind::Neumann, NodeKind::Junction})
      for (auto k : mesh.kinds()) total += k == kind;
    CHECK(total == mesh.node_count());
    CHECK(mesh.dof_count() + [&] {
      std::size_t c = 0;
      for (std::size_t n = 0; n < mesh.node_count(); ++n) c += mesh.constrained(n);
      return c;
    }() == mesh.node_count());
  }
}

TEST_CASE("indicator minimum over the region is refinement invariant") {
  double first = -1.0;
  for (int nodes : {21, 41, 81, 161}) {
    const Mesh mesh = build_mesh(th::mixed_interval(), {nodes});
    const double m = sample_damping(mesh, th::damping(th::box1(0.3, 0.55), 0.7)).min_over_region(mesh);
    if (first < 0) first = m;
    CHECK(m == first);
  }
  CHECK(first == doctest::Approx(0.7));
}

TEST_CASE("quadrature weights integrate constants exactly") {
  const Mesh mesh = build_mesh(th::square(), {9, 13});
  double sum = 0.0;
  for (std::size_t n = 0; n < mesh.node_count(); ++n) sum += mesh.quadrature_weight(n);
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("face and condition names round-trip") {
  for (Face f : faces_for(2)) CHECK(face_from_string(to_string(f)) == f);
  CHECK(condition_from_string("dirichlet") == BoundaryCondition::Dirichlet);
  CHECK_FALSE(condition_from_string("robin").has_value());
  CHECK(faces_for(1).size() == 2);
}
