#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <vector>

#include "wavezar/geometry.hpp"

namespace wavezar {

/// Dense work (eigen/singular values of the generator) is refused above this
/// many Laplacian degrees of freedom.
inline constexpr std::size_t kDenseDofCap = 2000;

struct Triplet {
  long row;
  long col;
  double value;
};

/// Discrete Laplacian on the free (non-Dirichlet) nodes of a mesh.
///
/// Two views are kept.  `weighted()` is the summation-by-parts form S = M L,
/// exactly symmetric and negative semidefinite, assembled edge by edge with
/// trapezoid face weights.  `matrix()` is the nodal operator L = M^{-1} S,
/// which is the classical (1, -2, 1)/h^2 stencil in the interior and the
/// ghost-node mirror closure on Neumann nodes.  L is symmetric whenever no
/// Neumann node is present and self-adjoint in the M inner product always.
class SparseOperator {
 public:
  SparseOperator(Eigen::SparseMatrix<double> weighted, Eigen::VectorXd mass, std::vector<std::size_t> dof_nodes,
                 std::size_t node_count);

  std::size_t size() const { return static_cast<std::size_t>(mass_.size()); }
  std::size_t node_count() const { return node_count_; }
  const std::vector<std::size_t>& dof_nodes() const { return dof_nodes_; }

  const Eigen::SparseMatrix<double>& weighted() const { return weighted_; }
  const Eigen::SparseMatrix<double>& matrix() const { return laplacian_; }
  const Eigen::VectorXd& mass() const { return mass_; }
  bool symmetric() const { return symmetric_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& u) const { return laplacian_ * u; }
  /// <u, K w> with K = -S, the discrete Dirichlet form (grad u, grad w).
  double stiffness_form(const Eigen::VectorXd& u, const Eigen::VectorXd& w) const;
  /// <u, w>_M.
  double mass_form(const Eigen::VectorXd& u, const Eigen::VectorXd& w) const;

  Eigen::MatrixXd dense() const;
  std::vector<Triplet> triplets() const;

  /// Gathers per-node values onto the dof ordering.
  Eigen::VectorXd restrict_nodes(const std::vector<double>& nodal) const;
  /// Scatters dof values to all nodes (constrained nodes get 0).
  std::vector<double> extend_to_nodes(const Eigen::VectorXd& dofs) const;

 private:
  Eigen::SparseMatrix<double> weighted_;
  Eigen::SparseMatrix<double> laplacian_;
  Eigen::VectorXd mass_;
  std::vector<std::size_t> dof_nodes_;
  std::size_t node_count_;
  bool symmetric_ = false;
};

/// Throws std::invalid_argument when the mesh has no free nodes.
SparseOperator assemble_laplacian(const Mesh& mesh);

/// The first-order generator A(u, v) = (v, L u - a v) on the reduced dofs.
class BlockGenerator {
 public:
  BlockGenerator(std::shared_ptr<const SparseOperator> laplacian, Eigen::VectorXd damping);

  const SparseOperator& laplacian() const { return *laplacian_; }
  const Eigen::VectorXd& damping() const { return damping_; }
  std::size_t dof_count() const { return laplacian_->size(); }

  void apply(const Eigen::VectorXd& u, const Eigen::VectorXd& v, Eigen::VectorXd& out_u,
             Eigen::VectorXd& out_v) const;

  /// 2n x 2n matrix [[0, I], [L, -diag(a)]].  Throws std::length_error above kDenseDofCap.
  Eigen::MatrixXd dense() const;

 private:
  std::shared_ptr<const SparseOperator> laplacian_;
  Eigen::VectorXd damping_;
};

/// Throws std::invalid_argument when the field does not match the operator's mesh.
BlockGenerator assemble_generator(const SparseOperator& laplacian, const DampingField& damping);

/// Lowest eigenpairs of -L: eigenvalues ascending, eigenvectors M-orthonormal
/// as columns.  Dense; refuses above kDenseDofCap.
struct LaplacianModes {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd vectors;
};
LaplacianModes laplacian_modes(const SparseOperator& laplacian, std::size_t count);

/// Writes "row col value" lines (0-based), one per stored entry of L.
void write_coordinate(const SparseOperator& op, std::ostream& os);

}  // namespace wavezar
