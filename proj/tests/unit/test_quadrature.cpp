// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <Eigen/LU>
#include <catch_amalgamated.hpp>
#include "cvembem/errors.hpp"
#include "cvembem/mesh.hpp"
#include "cvembem/quadrature.hpp"

using namespace cvembem;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{

double Integrate(const Rule1D &r, int j)
{
  double s = 0.0;
  for (int i = 0; i < r.Size(); i++)
  {
    s += r.w[i] * std::pow(r.x[i], j);
  }
  return s;
}

double MonomialExact(int j)
{
  return (j % 2 == 1) ? 0.0 : 2.0 / (j + 1);
}

CurvedPolygon Quad(Point a, Point b, Point c, Point d)
{
  return {{EdgeMap::Straight(a, b), EdgeMap::Straight(b, c), EdgeMap::Straight(c, d),
           EdgeMap::Straight(d, a)}};
}

}  // namespace

TEST_CASE("Gauss-Legendre closed forms", "[quadrature]")
{
  const Rule1D &g1 = GaussLegendre(1);
  CHECK(g1.x[0] == 0.0);
  CHECK_THAT(g1.w[0], WithinAbs(2.0, 1e-15));
  const Rule1D &g2 = GaussLegendre(2);
  CHECK_THAT(g2.x[0], WithinAbs(-1.0 / std::sqrt(3.0), 1e-15));
  CHECK_THAT(g2.x[1], WithinAbs(1.0 / std::sqrt(3.0), 1e-15));
  CHECK_THAT(g2.w[0], WithinAbs(1.0, 1e-15));
  CHECK_THAT(Integrate(GaussLegendre(5), 8), WithinAbs(2.0 / 9.0, 1e-14));
  CHECK_THROWS_AS(GaussLegendre(0), DomainError);
  CHECK_THROWS_AS(GaussLegendre(65), DomainError);
}

TEST_CASE("Gauss-Lobatto closed forms", "[quadrature]")
{
  const Rule1D &l2 = GaussLobatto(2);
  CHECK(l2.x == std::vector<double>{-1.0, 1.0});
  CHECK_THAT(l2.w[0], WithinAbs(1.0, 1e-15));
  const Rule1D &l3 = GaussLobatto(3);
  CHECK_THAT(l3.x[1], WithinAbs(0.0, 1e-15));
  CHECK_THAT(l3.w[0], WithinAbs(1.0 / 3.0, 1e-15));
  CHECK_THAT(l3.w[1], WithinAbs(4.0 / 3.0, 1e-15));
  const Rule1D &l4 = GaussLobatto(4);
  CHECK_THAT(l4.x[1], WithinAbs(-1.0 / std::sqrt(5.0), 1e-15));
  CHECK_THAT(l4.x[2], WithinAbs(1.0 / std::sqrt(5.0), 1e-15));
  CHECK_THROWS_AS(GaussLobatto(1), DomainError);
}

TEST_CASE("Rule exactness and structure", "[quadrature][property]")
{
  for (int n = 1; n <= 64; n++)
  {
    const Rule1D &g = GaussLegendre(n);
    for (int j = 0; j <= 2 * n - 1; j++)
    {
      CHECK_THAT(Integrate(g, j), WithinAbs(MonomialExact(j), 1e-13 * MonomialExact(j) + 1e-15));
    }
    for (int i = 0; i + 1 < n; i++)
    {
      CHECK(g.x[i] < g.x[i + 1]);
    }
  }
  for (int n = 2; n <= 32; n++)
  {
    const Rule1D &l = GaussLobatto(n);
    for (int j = 0; j <= 2 * n - 3; j++)
    {
      CHECK_THAT(Integrate(l, j), WithinAbs(MonomialExact(j), 1e-13 * MonomialExact(j) + 1e-15));
    }
    CHECK_THAT(Integrate(l, 0), WithinAbs(2.0, 1e-14));
    for (int i = 0; i + 1 < n; i++)
    {
      CHECK(l.x[i] < l.x[i + 1]);
    }
  }
}

TEST_CASE("q-smoothing", "[quadrature]")
{
  const Rule1D base = MapRule(GaussLegendre(8), 0.0, 1.0);
  const Rule1D r = QSmooth(base, 3, Endpoint::LEFT);
  double s = 0.0, sl = 0.0;
  for (int i = 0; i < r.Size(); i++)
  {
    s += r.w[i];
    sl += r.w[i] * std::log(r.x[i]);
  }
  CHECK_THAT(s, WithinAbs(1.0, 1e-14));
  // With s = t^3 the integrand becomes 9 t^2 log t, whose 8-point Gauss error is 8.28e-6.
  CHECK_THAT(sl, WithinAbs(-1.0, 1e-5));

  // Node t = 1 maps to s = 1 with weight scaled by 3.
  const Rule1D one = QSmooth({{1.0}, {0.5}}, 3, Endpoint::LEFT);
  CHECK(one.x[0] == 1.0);
  CHECK(one.w[0] == 1.5);
  const Rule1D mirrored = QSmooth({{0.0}, {0.5}}, 3, Endpoint::RIGHT);
  CHECK(mirrored.x[0] == 0.0);
  CHECK(mirrored.w[0] == 1.5);
  CHECK_THROWS_AS(QSmooth(base, 4, Endpoint::LEFT), ConfigError);
  CHECK_THROWS_AS(QSmooth(base, 1, Endpoint::LEFT), ConfigError);

  // int_0^1 s^g log s ds = -1/(g+1)^2, at both endpoints. The transformed integrand
  // behaves like t^(q(g+1)-1) log t, so the n-point error decays like n^(-2q(g+1)).
  auto error = [](int n, int qexp, double g, Endpoint end)
  {
    const Rule1D q = SmoothedGauss(n, qexp, end);
    double v = 0.0;
    for (int i = 0; i < q.Size(); i++)
    {
      const double x = (end == Endpoint::LEFT) ? q.x[i] : 1.0 - q.x[i];
      v += q.w[i] * std::pow(x, g) * std::log(x);
    }
    return std::abs(v + 1.0 / ((g + 1) * (g + 1)));
  };
  for (auto end : {Endpoint::LEFT, Endpoint::RIGHT})
  {
    CHECK(error(16, 3, 0.0, end) < 2e-7);
    CHECK(error(16, 3, 0.5, end) < 1e-9);
    CHECK(error(16, 5, 0.0, end) < 1e-8);
    CHECK(error(16, 5, 0.5, end) < 1e-8);
    CHECK(error(8, 5, 0.0, end) < 1e-6);
    // Doubling n gains about 2q bits.
    CHECK(error(8, 3, 0.0, end) / error(16, 3, 0.0, end) > 40.0);
    CHECK(error(16, 3, 0.0, end) / error(32, 3, 0.0, end) > 40.0);
  }
}

TEST_CASE("Transfinite map", "[quadrature]")
{
  const CurvedPolygon sq = Quad({0, 0}, {1, 0}, {1, 1}, {0, 1});
  Eigen::Matrix2d J;
  const Point x = TransfiniteMap(sq, 0.3, 0.8, &J);
  CHECK((x - Point(0.3, 0.8)).norm() < 1e-15);
  CHECK_THAT(J.determinant(), WithinAbs(1.0, 1e-15));

  const Mesh mesh = BuildAnnulusMesh(1.0, 2.0, 8, 2);
  // Elements in the outer ring have their curved edge (index 1) on the radius-2 circle.
  const CurvedPolygon E = mesh.GetShape(8);
  const Point m = TransfiniteMap(E, 1.0, 0.5);
  CHECK_THAT(m.norm(), WithinAbs(2.0, 1e-12));

  // Jacobian against finite differences on a curved element.
  const double h = 1e-6;
  TransfiniteMap(E, 0.4, 0.3, &J);
  const Point du = (TransfiniteMap(E, 0.4 + h, 0.3) - TransfiniteMap(E, 0.4 - h, 0.3)) / (2 * h);
  const Point dv = (TransfiniteMap(E, 0.4, 0.3 + h) - TransfiniteMap(E, 0.4, 0.3 - h)) / (2 * h);
  CHECK((J.col(0) - du).norm() < 1e-8);
  CHECK((J.col(1) - dv).norm() < 1e-8);

  // Sector area 1/2 (r1^2 - r0^2) dtheta, for every element of the single-ring annulus.
  const Mesh ring = BuildAnnulusMesh(1.0, 2.0, 8, 1);
  for (int e = 0; e < ring.NumElements(); e++)
  {
    const Rule2D r = ElementRule(ring.GetShape(e), 8);
    double a = 0.0;
    for (double w : r.w)
    {
      a += w;
    }
    CHECK_THAT(a, WithinAbs(0.5 * 3.0 * 2.0 * std::numbers::pi / 8, 1e-10));
  }

  // Clockwise vertex order is rejected.
  const CurvedPolygon cw = Quad({0, 0}, {0, 1}, {1, 1}, {1, 0});
  CHECK_THROWS_AS(ElementRule(cw, 4), AssemblyError);
}

TEST_CASE("Element rule", "[quadrature]")
{
  const Mesh mesh = BuildAnnulusMesh(1.0, 2.0, 8, 2);
  double area = 0.0;
  for (int e = 0; e < mesh.NumElements(); e++)
  {
    for (double w : ElementRule(mesh.GetShape(e), 8).w)
    {
      area += w;
    }
  }
  CHECK_THAT(area, WithinAbs(3.0 * std::numbers::pi, 1e-9));

  const CurvedPolygon sq = Quad({-1, 2}, {1, 2}, {1, 4}, {-1, 4});
  const Rule2D r = ElementRule(sq, 8);
  double a = 0.0;
  Point first = Point::Zero();
  for (int q = 0; q < r.Size(); q++)
  {
    a += r.w[q];
    first += r.w[q] * r.x[q];
  }
  CHECK_THAT(a, WithinAbs(4.0, 1e-14));
  CHECK((first - 4.0 * Point(0, 3)).norm() < 1e-13);
}

TEST_CASE("Element rule exact for polynomials on straight quadrilaterals", "[quadrature][property]")
{
  // A general convex quadrilateral; degree <= 4 monomials integrate exactly through the
  // bilinear map. Reference by splitting into triangles with a degree-8 Gauss rule on each.
  const Point a(0.1, -0.2), b(1.3, 0.1), c(1.1, 1.4), d(-0.2, 0.9);
  const CurvedPolygon P = Quad(a, b, c, d);
  const Rule2D r = ElementRule(P, 8);
  auto triangle = [](Point p0, Point p1, Point p2, int i, int j)
  {
    // Collapsed Gauss rule on a triangle, exact to high degree.
    const Rule1D g = MapRule(GaussLegendre(12), 0.0, 1.0);
    const double det = std::abs((p1 - p0).x() * (p2 - p0).y() - (p1 - p0).y() * (p2 - p0).x());
    double s = 0.0;
    for (int u = 0; u < g.Size(); u++)
    {
      for (int v = 0; v < g.Size(); v++)
      {
        const double x = g.x[u], y = g.x[v] * (1.0 - g.x[u]);
        const Point q = p0 + x * (p1 - p0) + y * (p2 - p0);
        s += g.w[u] * g.w[v] * (1.0 - g.x[u]) * det * std::pow(q.x(), i) * std::pow(q.y(), j);
      }
    }
    return s;
  };
  for (int i = 0; i <= 4; i++)
  {
    for (int j = 0; i + j <= 4; j++)
    {
      double s = 0.0;
      for (int q = 0; q < r.Size(); q++)
      {
        s += r.w[q] * std::pow(r.x[q].x(), i) * std::pow(r.x[q].y(), j);
      }
      const double ref = triangle(a, b, c, i, j) + triangle(a, c, d, i, j);
      CHECK_THAT(s, WithinAbs(ref, 1e-12));
    }
  }
}

TEST_CASE("Fan rule for general polygons", "[quadrature]")
{
  // Regular hexagon of circumradius 1: area 3 sqrt(3) / 2.
  CurvedPolygon hex;
  for (int i = 0; i < 6; i++)
  {
    const double t0 = std::numbers::pi * i / 3, t1 = std::numbers::pi * (i + 1) / 3;
    hex.edges.push_back(EdgeMap::Straight({std::cos(t0), std::sin(t0)}, {std::cos(t1), std::sin(t1)}));
  }
  const ElementMetrics m = ComputeMetrics(hex);
  CHECK_THAT(m.area, WithinAbs(1.5 * std::sqrt(3.0), 1e-13));
  CHECK(m.centroid.norm() < 1e-14);
  CHECK_THAT(m.diameter, WithinAbs(2.0, 1e-14));
}
