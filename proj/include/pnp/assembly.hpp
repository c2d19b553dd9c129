#pragma once

#include "pnp/fe.hpp"
#include "pnp/mesh.hpp"
#include "pnp/quadrature.hpp"

#include <Eigen/Sparse>

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

namespace pnp {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

using LocalMatrix = std::array<std::array<double, 3>, 3>;
using LocalVector = std::array<double, 3>;

// Element kernels. `t` is only forwarded to the fields through QuadPoint.
LocalMatrix local_stiffness(const ElementGeometry& g, Index t, const ScalarField& weight, const QuadratureRule& rule);
/// Entry (i,j) = ∫ (field φ_j)·∇φ_i.
LocalMatrix local_convection(const ElementGeometry& g, Index t, const VectorField& field, const QuadratureRule& rule);
LocalMatrix local_mass(const ElementGeometry& g, Index t, const ScalarField& weight, const QuadratureRule& rule);
LocalVector local_load(const ElementGeometry& g, Index t, const ScalarField& source, const QuadratureRule& rule);

// Global forms over all vertices (Dirichlet rows included).
using LocalMatrixFn = std::function<LocalMatrix(const ElementGeometry&, Index)>;
SparseMatrix assemble_elementwise(const Mesh& m, const LocalMatrixFn& local);

SparseMatrix assemble_weighted_stiffness(const Mesh& m, const ScalarField& weight,
                                         int quad_degree = kDefaultQuadratureDegree);
SparseMatrix assemble_convection(const Mesh& m, const VectorField& field, int quad_degree = kDefaultQuadratureDegree);
SparseMatrix assemble_mass(const Mesh& m, const ScalarField& weight, int quad_degree = kDefaultQuadratureDegree);
Vector assemble_load(const Mesh& m, const ScalarField& source, int quad_degree = kDefaultQuadratureDegree);

/// Vertex <-> free-index correspondence; boundary vertices are not free.
struct DofMap {
  std::vector<Index> free_to_vertex;
  std::vector<Index> vertex_to_free;  // -1 for Dirichlet vertices

  std::size_t num_free() const { return free_to_vertex.size(); }
};

DofMap make_dof_map(const Mesh& m);

/// Linear system over the free DOFs with the Dirichlet values it was reduced with.
struct SparseSystem {
  std::uint64_t mesh_id = 0;
  SparseMatrix matrix;
  Vector rhs;
  DofMap dofs;
  std::vector<double> boundary_values;  // full vertex length; only boundary entries are used
};

/// Eliminates the boundary rows and columns, moving A_fb * u_b to the rhs.
SparseSystem apply_dirichlet(const Mesh& m, const SparseMatrix& matrix, const Vector& rhs,
                             std::vector<double> boundary_values);
SparseSystem apply_dirichlet_zero(const Mesh& m, const SparseMatrix& matrix, const Vector& rhs);

/// Free solution extended by the stored boundary values.
std::vector<double> extend(const SparseSystem& sys, const Vector& free_solution);
Vector restrict_to_free(const DofMap& dofs, const std::vector<double>& full);

struct LinearSolveOptions {
  double relative_tolerance = 1e-10;
  std::size_t direct_limit = 200000;  // larger SPD systems use Jacobi-preconditioned CG
  int max_iterations = 20000;
};

/// Solves a symmetric positive definite free system.
Vector solve_spd(const SparseSystem& sys, const LinearSolveOptions& opts = {});
FeFunction solve_spd(const Mesh& m, const SparseSystem& sys, const LinearSolveOptions& opts = {});

/// Sparse LU for nonsymmetric systems.
Vector solve_general(const SparseMatrix& matrix, const Vector& rhs, double relative_tolerance = 1e-10);

}  // namespace pnp
