// SPDX-License-Identifier: Apache-2.0

#ifndef CVEMBEM_CVEM_HPP
#define CVEMBEM_CVEM_HPP

#include <array>
#include <complex>
#include <functional>
#include <vector>
#include <Eigen/Core>
#include <Eigen/SparseCore>
#include "cvembem/mesh.hpp"
#include "cvembem/quadrature.hpp"

namespace cvembem
{

//
// Scaled monomials m_a(x) = ((x - c) / h)^a, |a| <= k, ordered by degree:
// (0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...
//
class ScaledMonomials
{
public:
  ScaledMonomials(const Point &center, double h, int k);

  static int Dimension(int k) { return (k + 1) * (k + 2) / 2; }
  int Size() const { return static_cast<int>(alpha_.size()); }
  int Degree() const { return k_; }
  const std::array<int, 2> &Alpha(int i) const { return alpha_[i]; }
  int Index(int a, int b) const;  // -1 if a + b > k or negative.
  const Point &Center() const { return center_; }
  double Scale() const { return h_; }

  Eigen::VectorXd Values(const Point &x) const;
  Eigen::MatrixXd Gradients(const Point &x) const;  // Size() x 2.

  // Values at many points, one row per point.
  Eigen::MatrixXd Values(const std::vector<Point> &x) const;

private:
  Point center_;
  double h_;
  int k_;
  std::vector<std::array<int, 2>> alpha_;
};

// Element data needed by the local computations.
struct ElementView
{
  CurvedPolygon shape;
  ElementMetrics metrics;
  int id = -1;  // For error messages.
};

ElementView MakeElementView(const Mesh &mesh, int element);
ElementView MakeElementView(const CurvedPolygon &shape);

//
// Projector matrices mapping local dof vectors to scaled-monomial coefficients.
//
struct ProjectionMatrices
{
  int k;
  Eigen::MatrixXd Pnabla;  // Gradient projection, n_k x n.
  Eigen::MatrixXd P0;      // L2 projection, n_k x n.
  Eigen::MatrixXd G;       // Gradient Gram matrix (first row and column zero).
  Eigen::MatrixXd Gc;      // G with the first row replaced by boundary means of monomials.
  Eigen::MatrixXd H;       // L2 Gram matrix.
  Eigen::MatrixXd B;       // Right-hand sides of the gradient projection.
  Eigen::MatrixXd D;       // Dofs of the monomials, n x n_k.
};

ProjectionMatrices ComputeProjectors(const ElementView &E, int k);

struct LocalForms
{
  Eigen::MatrixXd A, M;
};

LocalForms ComputeLocalForms(const ProjectionMatrices &P);

// Local dofs of a smooth function: vertex values, edge-point values in traversal order,
// scaled moments (1/|E|) int f m_a for |a| <= k - 2.
Eigen::VectorXd InterpolateLocal(const ElementView &E, int k,
                                 const std::function<double(const Point &)> &f);

using SparseMatrixR = Eigen::SparseMatrix<double>;

struct GlobalBlocks
{
  SparseMatrixR A, M;          // Unknown x unknown.
  SparseMatrixR lift_A, lift_M;  // Unknown x constrained (Gamma0) columns.
  SparseMatrixR Q_gamma;       // Gamma x Gamma boundary mass, Gamma-local indices.
};

GlobalBlocks AssembleFemBlocks(const Mesh &mesh, const DofMap &dofs);

// Boundary mass on Gamma: entries int_Gamma Phi_j Phi_i, Gamma-local indices.
SparseMatrixR AssembleGammaMass(const Mesh &mesh, const DofMap &dofs);

// Global dof values of a function: unknowns and constrained (Gamma0) values.
struct DofValues
{
  Eigen::VectorXcd free, constrained;
};
DofValues InterpolateGlobal(const Mesh &mesh, const DofMap &dofs,
                            const std::function<std::complex<double>(const Point &)> &f);

// Lagrange basis on the edge nodes of degree k, evaluated at s in [0, 1].
Eigen::VectorXd EdgeLagrange(int k, double s);

}  // namespace cvembem

#endif  // CVEMBEM_CVEM_HPP
