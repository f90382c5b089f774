// SPDX-License-Identifier: Apache-2.0

#ifndef CVEMBEM_SOLVER_HPP
#define CVEMBEM_SOLVER_HPP

#include <functional>
#include <string>
#include <vector>
#include <Eigen/Core>
#include <Eigen/SparseCore>
#include "cvembem/bem.hpp"
#include "cvembem/cvem.hpp"
#include "cvembem/mesh.hpp"
#include "cvembem/specfun.hpp"

namespace cvembem
{

using ComplexField = std::function<Complex(const Point &)>;
using SparseMatrixC = Eigen::SparseMatrix<Complex>;

// Exterior Dirichlet problem: Laplace(u) + kappa^2 u = -f in the annular region, u = g on
// Gamma0, radiating at infinity. kappa^2 must not be an interior Dirichlet eigenvalue.
struct ProblemSpec
{
  double kappa = 1.0;
  ComplexField g;
  ComplexField f;  // Empty means zero.
  int level = 0;
  int k = 1;
};

// Load sum_E int_E f Pi0_1(Phi_i) for the unknowns and the constrained (Gamma0) dofs.
DofValues DiscreteLoad(const Mesh &mesh, const DofMap &dofs, const ComplexField &f);

// Values of g at the Gamma0 dofs.
Eigen::VectorXcd DirichletLift(const DofMap &dofs, const ComplexField &g);

//
// Coupled system with unknowns (u over the CVEM unknowns, lambda over Gamma):
//   [ A - kappa^2 M    -Q   ] [u     ]   [load - (lift_A - kappa^2 lift_M) g]
//   [ Q/2 - K           V   ] [lambda] = [0                                 ]
// Q and the boundary-integral row act on the Gamma unknowns only.
//
struct LinearSystem
{
  SparseMatrixC matrix;
  Eigen::VectorXcd rhs;
  int num_unknowns = 0;  // CVEM unknowns N.
  int num_interior = 0;
  int num_gamma = 0;
};

LinearSystem BuildSystem(const GlobalBlocks &blocks, const BemMatrices &bem, int num_interior,
                         const Eigen::VectorXcd &load, const Eigen::VectorXcd &lift);

struct SolveResult
{
  Eigen::VectorXcd u;              // CVEM unknowns, interior then Gamma.
  Eigen::VectorXcd u_constrained;  // Gamma0 values (the lift).
  Eigen::VectorXcd lambda;         // Normal derivative at the Gamma nodes.
  double residual_norm = 0.0;
  double rcond = 0.0;              // Reciprocal pivot ratio estimate of the factorization.
  int system_size = 0;
};

// Sparse LU with partial pivoting. Throws SolverError for a numerically singular matrix or a
// residual above 1e-8 (|rhs| + |A| |x|).
SolveResult Solve(const LinearSystem &system);

// Assembles and solves the full problem on a mesh.
SolveResult SolveProblem(const Mesh &mesh, const DofMap &dofs, const ProblemSpec &spec);

struct ExteriorValues
{
  std::vector<Complex> values;
  std::vector<std::string> warnings;
};

// Kirchhoff representation u(x) = int_Gamma [dG/dn_y u - G lambda] ds_y with the outward
// normal of the domain, 9-point Gauss per panel. Points closer than 0.05 h to Gamma get a
// warning, h being the longest panel.
ExteriorValues EvaluateExterior(const SolveResult &result, const BoundaryMesh &bm, double kappa,
                                const std::vector<Point> &points);

}  // namespace cvembem

#endif  // CVEMBEM_SOLVER_HPP
