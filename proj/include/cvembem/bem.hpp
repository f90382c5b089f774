// SPDX-License-Identifier: Apache-2.0

#ifndef CVEMBEM_BEM_HPP
#define CVEMBEM_BEM_HPP

#include <utility>
#include <vector>
#include <Eigen/Core>
#include "cvembem/cvem.hpp"
#include "cvembem/geometry.hpp"
#include "cvembem/mesh.hpp"

namespace cvembem
{

// Boundary edge of Gamma traversed counter-clockwise (the domain on its left), with the
// Gamma-local indices of its k + 1 trace nodes in traversal order.
struct Panel
{
  EdgeMap map;
  std::vector<int> dofs;
};

class BoundaryMesh
{
public:
  // Gamma panels of the mesh, chained into one closed counter-clockwise loop.
  BoundaryMesh(const Mesh &mesh, const DofMap &dofs);

  // Panels already ordered into a closed loop.
  BoundaryMesh(std::vector<Panel> panels, int k, int num_dofs);

  int Degree() const { return k_; }
  int NumDofs() const { return num_dofs_; }
  int NumPanels() const { return static_cast<int>(panels_.size()); }
  const std::vector<Panel> &Panels() const { return panels_; }

  // Same loop traversed clockwise. Used to check sign conventions.
  BoundaryMesh Reversed() const;

private:
  void Validate() const;

  std::vector<Panel> panels_;
  int k_;
  int num_dofs_;
};

//
// Galerkin matrices V_ij = int int G(x, y) Phi_j(y) Phi_i(x) and
// K_ij = int int dG/dn_y(x, y) Phi_j(y) Phi_i(x), with n_y the outward normal of the domain
// (the right normal of the counter-clockwise loop). kappa = 0 selects the Laplace kernels.
//
struct BemMatrices
{
  Eigen::MatrixXcd V, K;
  double kappa;
};

BemMatrices AssembleBem(const BoundaryMesh &bm, double kappa);
Eigen::MatrixXcd AssembleV(const BoundaryMesh &bm, double kappa);
Eigen::MatrixXcd AssembleK(const BoundaryMesh &bm, double kappa);

// Blocks (Q/2 - K, V) of the boundary-integral row of the coupled system.
std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> NrbcRowBlock(const BemMatrices &bem,
                                                           const SparseMatrixR &Q_gamma);

// Local (k+1) x (k+1) blocks of one panel pair, test panel p and trial panel q. Exposed for
// testing the quadrature against independent rules.
void PanelPairBlocks(const BoundaryMesh &bm, int p, int q, double kappa, Eigen::MatrixXcd &V,
                     Eigen::MatrixXcd &K);

}  // namespace cvembem

#endif  // CVEMBEM_BEM_HPP
