#include "incompat/fem.hpp"

#include <cmath>
#include <thread>

#include "incompat/errors.hpp"

namespace incompat {

namespace {

using StrainMatrix = Eigen::Matrix<double, 6, 24>;

StrainMatrix strain_matrix(const Eigen::Matrix<double, 8, 3>& g) {
  const double r = 1.0 / std::sqrt(2.0);
  StrainMatrix b = StrainMatrix::Zero();
  for (int a = 0; a < 8; ++a) {
    const double gx = g(a, 0), gy = g(a, 1), gz = g(a, 2);
    const int c = 3 * a;
    b(0, c + 0) = gx;
    b(1, c + 1) = gy;
    b(2, c + 2) = gz;
    b(3, c + 1) = r * gz;
    b(3, c + 2) = r * gy;
    b(4, c + 0) = r * gz;
    b(4, c + 2) = r * gx;
    b(5, c + 0) = r * gy;
    b(5, c + 1) = r * gx;
  }
  return b;
}

}  // namespace

ElasticOperator::ElasticOperator(const ElasticTensorField& c, BoundaryKind kind, int threads)
    : c_(c), kind_(kind), threads_(std::max(1, threads)) {
  const HexMesh& m = c_.mesh();
  num_nodes_ = kind_ == BoundaryKind::Free ? m.num_nodes() : m.num_cells();

  cell_dofs_.resize(m.num_cells());
  for (std::size_t cell = 0; cell < m.num_cells(); ++cell) {
    const auto nodes = m.cell_nodes(cell);
    for (int a = 0; a < 8; ++a) cell_dofs_[cell][a] = dof_node(nodes[a]);
  }

  const double w = m.gauss_weight();
  std::array<StrainMatrix, 8> bq;
  for (int q = 0; q < 8; ++q) bq[q] = strain_matrix(m.shape_gradients(q));
  for (const auto& t : c_.palette()) {
    ElementMatrix k = ElementMatrix::Zero();
    for (int q = 0; q < 8; ++q) k.noalias() += w * bq[q].transpose() * t.mandel() * bq[q];
    ke_.push_back(0.5 * (k + k.transpose()));
  }
  me_.setZero();
  for (int q = 0; q < 8; ++q) {
    const auto& nv = HexMesh::shape_values(q);
    me_.noalias() += w * nv * nv.transpose();
  }

  diag_ = Eigen::VectorXd::Zero(num_dofs());
  for (std::size_t cell = 0; cell < m.num_cells(); ++cell) {
    const auto& k = ke_[c_.phases()[cell]];
    for (int a = 0; a < 8; ++a)
      for (int i = 0; i < 3; ++i) diag_(3 * cell_dofs_[cell][a] + i) += k(3 * a + i, 3 * a + i);
  }

  // Kernel: translations, plus infinitesimal rotations about the box centre
  // for the free problem.
  const int nk = kind_ == BoundaryKind::Free ? 6 : 3;
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(num_dofs(), nk);
  const Vec3 centre = m.box().origin + 0.5 * m.box().size;
  for (std::size_t node = 0; node < m.num_nodes(); ++node) {
    const std::size_t d = dof_node(node);
    for (int i = 0; i < 3; ++i) basis(3 * d + i, i) = 1.0;
    if (nk == 6) {
      const Vec3 x = m.node_position(node) - centre;
      for (int r = 0; r < 3; ++r) {
        Vec3 axis = Vec3::Zero();
        axis(r) = 1.0;
        const Vec3 v = axis.cross(x);
        for (int i = 0; i < 3; ++i) basis(3 * d + i, 3 + r) = v(i);
      }
    }
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
  kernel_ = qr.householderQ() * Eigen::MatrixXd::Identity(num_dofs(), nk);
}

std::size_t ElasticOperator::dof_node(std::size_t mesh_node) const {
  if (kind_ == BoundaryKind::Free) return mesh_node;
  const HexMesh& m = c_.mesh();
  const auto& n = m.cells();
  const auto [i, j, k] = m.node_ijk(mesh_node);
  return (std::size_t(k % n[2]) * n[1] + (j % n[1])) * n[0] + (i % n[0]);
}

// Cells are visited in eight parity colours; cells of one colour share no
// nodes, so a colour can be split across threads without changing the
// accumulation order seen by any node.
template <class Kernel>
void ElasticOperator::for_each_cell(Kernel&& kern) const {
  const HexMesh& m = c_.mesh();
  const auto& n = m.cells();
  for (int colour = 0; colour < 8; ++colour) {
    const int px = colour & 1, py = (colour >> 1) & 1, pz = (colour >> 2) & 1;
    auto run = [&](int k_begin, int k_step) {
      for (int k = pz + 2 * k_begin; k < n[2]; k += 2 * k_step)
        for (int j = py; j < n[1]; j += 2)
          for (int i = px; i < n[0]; i += 2) kern(m.cell_index(i, j, k));
    };
    // Periodic meshes with odd cell counts break the colouring; stay serial.
    const bool parallel_ok = threads_ > 1 && (kind_ == BoundaryKind::Free ||
                                              (n[0] % 2 == 0 && n[1] % 2 == 0 && n[2] % 2 == 0));
    if (!parallel_ok) {
      run(0, 1);
      continue;
    }
    std::vector<std::thread> pool;
    for (int t = 0; t < threads_; ++t) pool.emplace_back(run, t, threads_);
    for (auto& th : pool) th.join();
  }
}

void ElasticOperator::apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
  y.setZero(num_dofs());
  for_each_cell([&](std::size_t cell) {
    const auto& dofs = cell_dofs_[cell];
    Eigen::Matrix<double, 24, 1> xe;
    for (int a = 0; a < 8; ++a) xe.segment<3>(3 * a) = x.segment<3>(3 * dofs[a]);
    const Eigen::Matrix<double, 24, 1> ye = ke_[c_.phases()[cell]] * xe;
    for (int a = 0; a < 8; ++a) y.segment<3>(3 * dofs[a]) += ye.segment<3>(3 * a);
  });
}

void ElasticOperator::apply_mass(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
  y.setZero(num_dofs());
  for_each_cell([&](std::size_t cell) {
    const auto& dofs = cell_dofs_[cell];
    Eigen::Matrix<double, 8, 3> xe;
    for (int a = 0; a < 8; ++a) xe.row(a) = x.segment<3>(3 * dofs[a]).transpose();
    const Eigen::Matrix<double, 8, 3> ye = me_ * xe;
    for (int a = 0; a < 8; ++a) y.segment<3>(3 * dofs[a]) += ye.row(a).transpose();
  });
}

Eigen::VectorXd ElasticOperator::load(const TensorField& f) const {
  const HexMesh& m = c_.mesh();
  if (f.size() != m.num_gauss()) throw std::invalid_argument("forcing field lives on a different mesh");
  Eigen::VectorXd b = Eigen::VectorXd::Zero(num_dofs());
  const double w = m.gauss_weight();
  for_each_cell([&](std::size_t cell) {
    Eigen::Matrix<double, 3, 8> be = Eigen::Matrix<double, 3, 8>::Zero();
    for (int q = 0; q < 8; ++q) be.noalias() -= w * f.at(cell, q) * m.shape_gradients(q).transpose();
    const auto& dofs = cell_dofs_[cell];
    for (int a = 0; a < 8; ++a) b.segment<3>(3 * dofs[a]) += be.col(a);
  });
  return b;
}

void ElasticOperator::project_out_kernel(Eigen::VectorXd& x) const {
  x.noalias() -= kernel_ * (kernel_.transpose() * x);
}

Eigen::VectorXd ElasticOperator::to_dofs(const VectorField& u) const {
  const HexMesh& m = c_.mesh();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(num_dofs());
  for (std::size_t node = 0; node < m.num_nodes(); ++node) x.segment<3>(3 * dof_node(node)) = u[node];
  return x;
}

VectorField ElasticOperator::to_field(const Eigen::VectorXd& x) const {
  const HexMesh& m = c_.mesh();
  VectorField u(m);
  for (std::size_t node = 0; node < m.num_nodes(); ++node) u[node] = x.segment<3>(3 * dof_node(node));
  return u;
}

SolverStats projected_cg(const ElasticOperator& op, const Eigen::VectorXd& b_in, Eigen::VectorXd& x,
                         const SolverOptions& opts) {
  SolverStats stats;
  Eigen::VectorXd b = b_in;
  op.project_out_kernel(b);
  if (x.size() != op.num_dofs()) x = Eigen::VectorXd::Zero(op.num_dofs());
  op.project_out_kernel(x);

  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    x.setZero();
    stats.converged = true;
    return stats;
  }
  const Eigen::VectorXd inv_diag = op.diagonal().cwiseInverse();

  Eigen::VectorXd r(op.num_dofs()), ap(op.num_dofs());
  op.apply(x, ap);
  r = b - ap;
  op.project_out_kernel(r);
  Eigen::VectorXd z = inv_diag.cwiseProduct(r);
  op.project_out_kernel(z);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);

  for (int it = 0; it < opts.max_iterations; ++it) {
    const double rnorm = r.norm();
    stats.relative_residual = rnorm / bnorm;
    stats.iterations = it;
    if (stats.relative_residual <= opts.rtol) {
      stats.converged = true;
      return stats;
    }
    op.apply(p, ap);
    const double pap = p.dot(ap);
    if (!(pap > 0.0)) break;
    const double alpha = rz / pap;
    x.noalias() += alpha * p;
    r.noalias() -= alpha * ap;
    op.project_out_kernel(r);
    z = inv_diag.cwiseProduct(r);
    op.project_out_kernel(z);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  // Recompute the true residual before giving up.
  op.apply(x, ap);
  r = b - ap;
  op.project_out_kernel(r);
  stats.relative_residual = r.norm() / bnorm;
  stats.converged = stats.relative_residual <= opts.rtol;
  stats.iterations = opts.max_iterations;
  return stats;
}

}  // namespace incompat
