#include "wavezar/discretization.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

namespace wavezar {

SparseOperator::SparseOperator(Eigen::SparseMatrix<double> weighted, Eigen::VectorXd mass,
                               std::vector<std::size_t> dof_nodes, std::size_t node_count)
    : weighted_(std::move(weighted)), mass_(std::move(mass)), dof_nodes_(std::move(dof_nodes)), node_count_(node_count) {
  if (weighted_.rows() != mass_.size() || weighted_.cols() != mass_.size())
    throw std::invalid_argument("SparseOperator: weighted form and mass have different sizes");
  if (static_cast<std::size_t>(mass_.size()) != dof_nodes_.size())
    throw std::invalid_argument("SparseOperator: dof map size does not match the operator");
  weighted_.makeCompressed();
  laplacian_ = mass_.cwiseInverse().asDiagonal() * weighted_;
  laplacian_.makeCompressed();
  Eigen::SparseMatrix<double> t = laplacian_.transpose();
  symmetric_ = (t - laplacian_).norm() == 0.0;
}

double SparseOperator::stiffness_form(const Eigen::VectorXd& u, const Eigen::VectorXd& w) const {
  return -u.dot(weighted_ * w);
}

double SparseOperator::mass_form(const Eigen::VectorXd& u, const Eigen::VectorXd& w) const {
  return u.cwiseProduct(mass_).dot(w);
}

Eigen::MatrixXd SparseOperator::dense() const { return Eigen::MatrixXd(laplacian_); }

std::vector<Triplet> SparseOperator::triplets() const {
  std::vector<Triplet> out;
  for (int k = 0; k < laplacian_.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(laplacian_, k); it; ++it)
      out.push_back({static_cast<long>(it.row()), static_cast<long>(it.col()), it.value()});
  std::sort(out.begin(), out.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  return out;
}

Eigen::VectorXd SparseOperator::restrict_nodes(const std::vector<double>& nodal) const {
  if (nodal.size() != node_count_) throw std::invalid_argument("restrict_nodes: node count mismatch");
  Eigen::VectorXd out(static_cast<Eigen::Index>(dof_nodes_.size()));
  for (std::size_t d = 0; d < dof_nodes_.size(); ++d) out[static_cast<Eigen::Index>(d)] = nodal[dof_nodes_[d]];
  return out;
}

std::vector<double> SparseOperator::extend_to_nodes(const Eigen::VectorXd& dofs) const {
  std::vector<double> out(node_count_, 0.0);
  for (std::size_t d = 0; d < dof_nodes_.size(); ++d) out[dof_nodes_[d]] = dofs[static_cast<Eigen::Index>(d)];
  return out;
}

SparseOperator assemble_laplacian(const Mesh& mesh) {
  const std::size_t n = mesh.dof_count();
  if (n == 0) throw std::invalid_argument("assemble_laplacian: mesh has no free nodes");
  const int dim = mesh.dimension();
  const auto& h = mesh.spacing();
  const auto& counts = mesh.counts();

  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(n * (2 * dim + 1) * 2);
  auto add_edge = [&](std::size_t p, std::size_t q, double c) {
    const long dp = mesh.dof(p);
    const long dq = mesh.dof(q);
    if (dp >= 0) entries.emplace_back(dp, dp, -c);
    if (dq >= 0) entries.emplace_back(dq, dq, -c);
    if (dp >= 0 && dq >= 0) {
      entries.emplace_back(dp, dq, c);
      entries.emplace_back(dq, dp, c);
    }
  };

  for (std::size_t node = 0; node < mesh.node_count(); ++node) {
    const auto idx = mesh.multi_index(node);
    for (int axis = 0; axis < dim; ++axis) {
      if (idx[axis] + 1 >= counts[axis]) continue;
      const std::size_t next = axis == 0 ? mesh.node_index(idx[0] + 1, idx[1]) : mesh.node_index(idx[0], idx[1] + 1);
      // Edge conductance: transverse trapezoid width over the edge length.
      double c = 1.0 / h[axis];
      for (int other = 0; other < dim; ++other) {
        if (other == axis) continue;
        c *= mesh.on_boundary(node, other) ? 0.5 * h[other] : h[other];
      }
      add_edge(node, next, c);
    }
  }

  Eigen::SparseMatrix<double> weighted(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  weighted.setFromTriplets(entries.begin(), entries.end());
  Eigen::VectorXd mass(static_cast<Eigen::Index>(n));
  for (std::size_t d = 0; d < n; ++d) mass[static_cast<Eigen::Index>(d)] = mesh.quadrature_weight(mesh.free_nodes()[d]);
  return SparseOperator(std::move(weighted), std::move(mass), mesh.free_nodes(), mesh.node_count());
}

BlockGenerator::BlockGenerator(std::shared_ptr<const SparseOperator> laplacian, Eigen::VectorXd damping)
    : laplacian_(std::move(laplacian)), damping_(std::move(damping)) {
  if (static_cast<std::size_t>(damping_.size()) != laplacian_->size())
    throw std::invalid_argument("assemble_generator: damping has " + std::to_string(damping_.size()) +
                                " dofs, Laplacian has " + std::to_string(laplacian_->size()));
}

void BlockGenerator::apply(const Eigen::VectorXd& u, const Eigen::VectorXd& v, Eigen::VectorXd& out_u,
                           Eigen::VectorXd& out_v) const {
  out_u = v;
  out_v = laplacian_->apply(u) - damping_.cwiseProduct(v);
}

Eigen::MatrixXd BlockGenerator::dense() const {
  const auto n = static_cast<Eigen::Index>(dof_count());
  if (dof_count() > kDenseDofCap)
    throw std::length_error("generator has " + std::to_string(dof_count()) + " dofs; dense work is capped at " +
                            std::to_string(kDenseDofCap));
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  a.topRightCorner(n, n).setIdentity();
  a.bottomLeftCorner(n, n) = laplacian_->dense();
  a.bottomRightCorner(n, n) = (-damping_).asDiagonal();
  return a;
}

BlockGenerator assemble_generator(const SparseOperator& laplacian, const DampingField& damping) {
  if (damping.values.size() != laplacian.node_count())
    throw std::invalid_argument("assemble_generator: damping field has " + std::to_string(damping.values.size()) +
                                " nodes, mesh has " + std::to_string(laplacian.node_count()));
  return BlockGenerator(std::make_shared<const SparseOperator>(laplacian), laplacian.restrict_nodes(damping.values));
}

LaplacianModes laplacian_modes(const SparseOperator& laplacian, std::size_t count) {
  if (laplacian.size() > kDenseDofCap)
    throw std::length_error("laplacian_modes: " + std::to_string(laplacian.size()) +
                            " dofs exceed the dense cap of " + std::to_string(kDenseDofCap));
  const Eigen::VectorXd inv_sqrt = laplacian.mass().cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd s = Eigen::MatrixXd(laplacian.weighted());
  const Eigen::MatrixXd sym = -(inv_sqrt.asDiagonal() * s * inv_sqrt.asDiagonal());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success) throw std::runtime_error("laplacian_modes: eigensolver failed");
  const auto m = static_cast<Eigen::Index>(std::min(count, laplacian.size()));
  LaplacianModes out;
  out.eigenvalues = solver.eigenvalues().head(m);
  out.vectors = inv_sqrt.asDiagonal() * solver.eigenvectors().leftCols(m);
  return out;
}

void write_coordinate(const SparseOperator& op, std::ostream& os) {
  char buf[96];
  for (const auto& t : op.triplets()) {
    std::snprintf(buf, sizeof buf, "%ld %ld %.17g\n", t.row, t.col, t.value);
    os << buf;
  }
}

}  // namespace wavezar
