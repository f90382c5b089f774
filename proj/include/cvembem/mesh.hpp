// SPDX-License-Identifier: Apache-2.0

#ifndef CVEMBEM_MESH_HPP
#define CVEMBEM_MESH_HPP

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>
#include "cvembem/geometry.hpp"
#include "cvembem/quadrature.hpp"

namespace cvembem
{

enum class BoundaryTag
{
  INTERIOR,
  GAMMA0,
  GAMMA
};

struct Vertex
{
  int id;
  Point x;
  BoundaryTag tag;
};

struct Edge
{
  int id;
  int v_from, v_to;
  int curve;  // Index into Mesh::Curves(), -1 for straight edges.
  double t0, t1;
  BoundaryTag tag;

  bool IsCurved() const { return curve >= 0; }
};

struct Element
{
  int id;
  std::vector<int> vertices;    // Counter-clockwise.
  std::vector<int> edges;       // Edge i joins vertices i and i + 1.
  std::vector<bool> reversed;   // Edge i is traversed against its stored direction.
  Point centroid;
  double diameter;
  double area;

  int NumVertices() const { return static_cast<int>(vertices.size()); }
};

// Input to the Mesh constructor: elements are given by vertex lists, and each pair of
// consecutive vertices must match exactly one edge.
struct MeshData
{
  std::vector<Curve> curves;
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
  std::vector<std::vector<int>> elements;
  int level = 0;
};

class Mesh
{
public:
  // Validates topology and geometry and computes element metrics. Throws AssemblyError.
  explicit Mesh(MeshData data);

  const std::vector<Curve> &Curves() const { return curves_; }
  const std::vector<Vertex> &Vertices() const { return vertices_; }
  const std::vector<Edge> &Edges() const { return edges_; }
  const std::vector<Element> &Elements() const { return elements_; }
  int NumVertices() const { return static_cast<int>(vertices_.size()); }
  int NumEdges() const { return static_cast<int>(edges_.size()); }
  int NumElements() const { return static_cast<int>(elements_.size()); }
  int Level() const { return level_; }
  double H() const { return h_; }

  // Map of an edge from v_from (s = 0) to v_to (s = 1).
  EdgeMap GetEdgeMap(int edge) const;

  // Element boundary in counter-clockwise traversal.
  CurvedPolygon GetShape(int element) const;

  // Incident elements per edge (one or two).
  const std::vector<std::vector<int>> &EdgeElements() const { return edge_elements_; }

  // Shape-regularity diagnostics: a message for every element where the centroid is not a
  // kernel point with clearance rho * h_E, or an edge is shorter than rho * h_E.
  std::vector<std::string> CheckShapeRegularity(double rho = 0.1) const;

private:
  std::vector<Curve> curves_;
  std::vector<Vertex> vertices_;
  std::vector<Edge> edges_;
  std::vector<Element> elements_;
  std::vector<std::vector<int>> edge_elements_;
  int level_;
  double h_;
};

// Structured annulus r0 < |x| < r1 with n_theta x n_r curved quadrilaterals. The inner circle
// is Gamma0 and the outer circle is Gamma.
Mesh BuildAnnulusMesh(double r0, double r1, int n_theta, int n_r);

// Ring between the squares [-a0, a0]^2 (Gamma0) and [-a1, a1]^2 (Gamma), n_per_side elements
// along each side and n_layers across.
Mesh BuildSquareRingMesh(double a0, double a1, int n_per_side, int n_layers);

// Quadrisection by edge midpoints; curved edges are split at the parameter midpoint.
Mesh Refine(const Mesh &mesh);

void WriteMesh(const Mesh &mesh, const std::string &path);
Mesh ReadMesh(const std::string &path);
void WriteMesh(const Mesh &mesh, std::ostream &os);
Mesh ReadMesh(std::istream &is);

enum class DofKind
{
  VERTEX,
  EDGE_POINT,
  MOMENT
};

struct DofRecord
{
  DofKind kind;
  int entity;     // Vertex, edge or element id.
  int local;      // Edge point 0..k-2 along the edge direction, or monomial index.
  Point x;        // Location (NaN for moments).
  BoundaryTag tag;
};

//
// Degrees of freedom of the degree-k virtual element space. Unknowns are numbered with the
// interior set first, then the Gamma set. Dofs on Gamma0 carry Dirichlet data and are
// numbered separately.
//
class DofMap
{
public:
  DofMap(const Mesh &mesh, int k);

  int Degree() const { return k_; }
  int NumUnknowns() const { return n_interior_ + n_gamma_; }
  int NumInterior() const { return n_interior_; }
  int NumGamma() const { return n_gamma_; }
  int NumConstrained() const { return static_cast<int>(constrained_.size()); }

  const DofRecord &Unknown(int i) const { return unknowns_[i]; }
  const DofRecord &Constrained(int c) const { return constrained_[c]; }

  // Local dofs of an element: vertices, then k-1 points per edge in traversal order, then
  // k(k-1)/2 moments. Entries >= 0 are unknown indices, entries < 0 encode constrained
  // dof c as -1 - c.
  const std::vector<int> &ElementDofs(int element) const { return element_dofs_[element]; }

  // Unknown or constrained dofs on an edge from v_from to v_to (k+1 entries, encoded as
  // above).
  std::vector<int> EdgeDofs(int edge) const;

  static int LocalCount(int n_vertices, int k) { return k * n_vertices + k * (k - 1) / 2; }

private:
  int k_;
  int n_interior_ = 0, n_gamma_ = 0;
  std::vector<DofRecord> unknowns_, constrained_;
  std::vector<int> vertex_dof_;               // Encoded dof per vertex.
  std::vector<std::vector<int>> edge_dofs_;   // Encoded internal dofs per edge.
  std::vector<std::vector<int>> element_dofs_;
  std::vector<std::pair<int, int>> edge_vertices_;
};

// Nodes in [0, 1] of the edge traces: 0, the k-1 internal Gauss-Lobatto points, 1.
std::vector<double> EdgeNodes(int k);

const char *TagName(BoundaryTag tag);

}  // namespace cvembem

#endif  // CVEMBEM_MESH_HPP
