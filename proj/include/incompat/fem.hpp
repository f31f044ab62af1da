#pragma once

#include <Eigen/Dense>
#include <vector>

#include "incompat/material.hpp"
#include "incompat/mesh.hpp"

namespace incompat {

enum class BoundaryKind { Free, Periodic };

struct SolverOptions {
  double rtol = 1e-10;
  int max_iterations = 20000;
  int threads = 1;
};

struct SolverStats {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Matrix-free trilinear stiffness operator x -> A x with
/// (A u) . v = int C Du . Dv, on the nodes of a HexMesh.
///
/// Free boundaries keep every node as a degree of freedom (traction-free
/// problem, kernel = rigid motions). Periodic boundaries identify opposite
/// faces (kernel = translations).
class ElasticOperator {
 public:
  ElasticOperator(const ElasticTensorField& c, BoundaryKind kind, int threads = 1);

  const HexMesh& mesh() const { return c_.mesh(); }
  BoundaryKind kind() const { return kind_; }
  Eigen::Index num_dofs() const { return 3 * Eigen::Index(num_nodes_); }

  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;
  const Eigen::VectorXd& diagonal() const { return diag_; }

  /// b_a = -int F . D phi_a for every nodal basis function phi_a.
  Eigen::VectorXd load(const TensorField& f) const;

  /// Orthonormal (Euclidean) basis of the discrete kernel.
  const Eigen::MatrixXd& kernel() const { return kernel_; }
  void project_out_kernel(Eigen::VectorXd& x) const;

  Eigen::VectorXd to_dofs(const VectorField& u) const;
  VectorField to_field(const Eigen::VectorXd& x) const;

  /// Consistent mass matrix product (Gauss-integrated).
  void apply_mass(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;

  std::size_t dof_node(std::size_t mesh_node) const;

 private:
  using ElementMatrix = Eigen::Matrix<double, 24, 24>;

  template <class Kernel>
  void for_each_cell(Kernel&& k) const;

  ElasticTensorField c_;
  BoundaryKind kind_;
  int threads_;
  std::size_t num_nodes_ = 0;
  std::vector<std::array<std::size_t, 8>> cell_dofs_;
  std::vector<ElementMatrix> ke_;
  Eigen::Matrix<double, 8, 8> me_;
  Eigen::VectorXd diag_;
  Eigen::MatrixXd kernel_;
};

/// Jacobi-preconditioned conjugate gradients on the complement of the
/// operator kernel; residual and search direction are re-projected every
/// iteration. Starts from x (warm start) and leaves the result in x.
SolverStats projected_cg(const ElasticOperator& op, const Eigen::VectorXd& b, Eigen::VectorXd& x,
                         const SolverOptions& opts);

}  // namespace incompat
