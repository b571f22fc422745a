#pragma once

#include <string>
#include <vector>

#include "wavezar/config.hpp"
#include "wavezar/geometry.hpp"

namespace th {

using namespace wavezar;

inline DomainSpec interval(BoundaryCondition left, BoundaryCondition right, bool diagnostic = false) {
  DomainSpec d;
  d.dimension = 1;
  d.extent = {{0.0, 1.0}};
  d.partition = BoundaryPartition({{Face::Left, {0, 0}, left}, {Face::Right, {0, 0}, right}});
  d.diagnostic = diagnostic;
  return d;
}

inline DomainSpec mixed_interval() { return interval(BoundaryCondition::Dirichlet, BoundaryCondition::Neumann); }

// Unit square: Neumann on left/right, Dirichlet on bottom/top.
inline DomainSpec square() {
  DomainSpec d;
  d.dimension = 2;
  d.extent = {{0.0, 1.0}, {0.0, 1.0}};
  d.partition = BoundaryPartition({{Face::Left, {0, 1}, BoundaryCondition::Neumann},
                                   {Face::Right, {0, 1}, BoundaryCondition::Neumann},
                                   {Face::Bottom, {0, 1}, BoundaryCondition::Dirichlet},
                                   {Face::Top, {0, 1}, BoundaryCondition::Dirichlet}});
  return d;
}

inline std::vector<Box> box1(double lo, double hi) { return {Box{{{lo, hi}}}}; }
inline std::vector<Box> box2(double xlo, double xhi, double ylo, double yhi) {
  return {Box{{{xlo, xhi}, {ylo, yhi}}}};
}

inline DampingSpec damping(std::vector<Box> region, double a0 = 1.0) {
  DampingSpec s;
  s.region = std::move(region);
  s.a0 = a0;
  return s;
}

inline std::string source_path(const std::string& rel) { return std::string(WAVEZAR_SOURCE_DIR) + "/" + rel; }

inline ExperimentConfig load(const std::string& rel) { return parse_config(source_path(rel)); }

}  // namespace th
