// SPDX-License-Identifier: Apache-2.0

#ifndef CVEMBEM_QUADRATURE_HPP
#define CVEMBEM_QUADRATURE_HPP

#include <vector>
#include <Eigen/Core>
#include "cvembem/geometry.hpp"

namespace cvembem
{

struct Rule1D
{
  std::vector<double> x, w;
  int Size() const { return static_cast<int>(x.size()); }
};

struct Rule2D
{
  std::vector<Point> x;
  std::vector<double> w;
  int Size() const { return static_cast<int>(x.size()); }
};

// n-point rules on [-1, 1]. Results are cached; the references stay valid.
const Rule1D &GaussLegendre(int n);
const Rule1D &GaussLobatto(int n);

// Affine map of a rule on [-1, 1] to [a, b].
Rule1D MapRule(const Rule1D &rule, double a, double b);

// q-smoothing of a rule on [0, 1]: substitution s = t^q (singular endpoint 0) or
// s = 1 - (1 - t)^q (endpoint 1), clustering nodes at the singular endpoint. q odd, >= 3.
enum class Endpoint
{
  LEFT,
  RIGHT
};
Rule1D QSmooth(const Rule1D &rule01, int q, Endpoint endpoint);

// Shorthand for QSmooth of the n-point Gauss rule mapped to [0, 1].
Rule1D SmoothedGauss(int n, int q, Endpoint endpoint);

// Element with edges listed in counter-clockwise order; edge i runs from vertex i to i + 1.
struct CurvedPolygon
{
  std::vector<EdgeMap> edges;

  int NumVertices() const { return static_cast<int>(edges.size()); }
  Point Vertex(int i) const { return edges[i].Start(); }
};

// Coons transfinite map of a quadrilateral from [0, 1]^2 and its Jacobian matrix.
Point TransfiniteMap(const CurvedPolygon &E, double u, double v, Eigen::Matrix2d *jac = nullptr);

// Tensor Gauss rule through the transfinite map for quadrilaterals, and through collapsed
// maps on the fan about the vertex average for other polygons. Weights include |J|.
Rule2D ElementRule(const CurvedPolygon &E, int n);

struct ElementMetrics
{
  double area;
  Point centroid;
  double diameter;
};

ElementMetrics ComputeMetrics(const CurvedPolygon &E);

}  // namespace cvembem

#endif  // CVEMBEM_QUADRATURE_HPP
