// SPDX-License-Identifier: Apache-2.0

#include "cvembem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <utility>
#include "cvembem/errors.hpp"

namespace cvembem
{

namespace
{

std::pair<int, int> Key(int a, int b)
{
  return {std::min(a, b), std::max(a, b)};
}

}  // namespace

const char *TagName(BoundaryTag tag)
{
  switch (tag)
  {
    case BoundaryTag::INTERIOR:
      return "interior";
    case BoundaryTag::GAMMA0:
      return "gamma0";
    case BoundaryTag::GAMMA:
      return "gamma";
  }
  return "";
}

Mesh::Mesh(MeshData data)
  : curves_(std::move(data.curves)), vertices_(std::move(data.vertices)),
    edges_(std::move(data.edges)), level_(data.level), h_(0.0)
{
  const int nv = NumVertices(), ne = NumEdges();
  for (int i = 0; i < nv; i++)
  {
    if (vertices_[i].id != i)
    {
      throw AssemblyError("vertex ids must be contiguous from 0");
    }
    if (!vertices_[i].x.allFinite())
    {
      throw AssemblyError("vertex " + std::to_string(i) + " has non-finite coordinates");
    }
  }

  std::map<std::pair<int, int>, int> edge_of;
  for (int i = 0; i < ne; i++)
  {
    const Edge &e = edges_[i];
    if (e.id != i)
    {
      throw AssemblyError("edge ids must be contiguous from 0");
    }
    if (e.v_from < 0 || e.v_from >= nv || e.v_to < 0 || e.v_to >= nv || e.v_from == e.v_to)
    {
      throw AssemblyError("edge " + std::to_string(i) + " has invalid vertices");
    }
    if (e.IsCurved())
    {
      if (e.curve >= static_cast<int>(curves_.size()))
      {
        throw AssemblyError("edge " + std::to_string(i) + " references unknown curve");
      }
      if (e.tag == BoundaryTag::INTERIOR)
      {
        throw AssemblyError("curved edge " + std::to_string(i) + " is not on the boundary");
      }
      const Curve &c = curves_[e.curve];
      const Point a = c.Eval(e.t0), b = c.Eval(e.t1);
      const double scale = std::max(1.0, c.Radius() + c.Center().norm());
      if ((a - vertices_[e.v_from].x).norm() > 1.0e-12 * scale ||
          (b - vertices_[e.v_to].x).norm() > 1.0e-12 * scale)
      {
        throw AssemblyError("curved edge " + std::to_string(i) +
                            " endpoints do not match its curve");
      }
    }
    if (!edge_of.emplace(Key(e.v_from, e.v_to), i).second)
    {
      throw AssemblyError("duplicate edge between vertices " + std::to_string(e.v_from) +
                          " and " + std::to_string(e.v_to));
    }
  }

  edge_elements_.assign(ne, {});
  std::vector<std::vector<bool>> edge_dirs(ne);
  for (std::size_t id = 0; id < data.elements.size(); id++)
  {
    const auto &vs = data.elements[id];
    const int n = static_cast<int>(vs.size());
    if (n < 3)
    {
      throw AssemblyError("element " + std::to_string(id) + " has fewer than 3 vertices");
    }
    Element E;
    E.id = static_cast<int>(id);
    E.vertices = vs;
    for (int i = 0; i < n; i++)
    {
      const int a = vs[i], b = vs[(i + 1) % n];
      if (a < 0 || a >= nv)
      {
        throw AssemblyError("element " + std::to_string(id) + " has invalid vertex");
      }
      auto it = edge_of.find(Key(a, b));
      if (it == edge_of.end())
      {
        throw AssemblyError("element " + std::to_string(id) + " side " + std::to_string(a) +
                            "-" + std::to_string(b) + " has no edge");
      }
      const bool rev = edges_[it->second].v_from != a;
      E.edges.push_back(it->second);
      E.reversed.push_back(rev);
      edge_elements_[it->second].push_back(E.id);
      edge_dirs[it->second].push_back(rev);
    }
    elements_.push_back(std::move(E));
  }

  for (int i = 0; i < ne; i++)
  {
    const auto &inc = edge_elements_[i];
    const Edge &e = edges_[i];
    if (inc.empty() || inc.size() > 2)
    {
      throw AssemblyError("edge " + std::to_string(i) + " has " +
                          std::to_string(inc.size()) + " incident elements");
    }
    if (inc.size() == 2)
    {
      if (edge_dirs[i][0] == edge_dirs[i][1])
      {
        throw AssemblyError("elements sharing edge " + std::to_string(i) +
                            " have the same orientation");
      }
      if (e.tag != BoundaryTag::INTERIOR)
      {
        throw AssemblyError("edge " + std::to_string(i) + " is shared but tagged boundary");
      }
    }
    else
    {
      if (e.tag == BoundaryTag::INTERIOR)
      {
        throw AssemblyError("boundary edge " + std::to_string(i) + " is tagged interior");
      }
      if (vertices_[e.v_from].tag != e.tag || vertices_[e.v_to].tag != e.tag)
      {
        throw AssemblyError("vertex tags disagree with boundary edge " + std::to_string(i));
      }
    }
  }

  for (auto &E : elements_)
  {
    const ElementMetrics m = ComputeMetrics(GetShape(E.id));
    if (!(m.area > 0.0) || !(m.diameter > 0.0))
    {
      throw AssemblyError("element " + std::to_string(E.id) + " is degenerate");
    }
    E.area = m.area;
    E.centroid = m.centroid;
    E.diameter = m.diameter;
    h_ = std::max(h_, m.diameter);
  }
}

EdgeMap Mesh::GetEdgeMap(int edge) const
{
  const Edge &e = edges_[edge];
  if (e.IsCurved())
  {
    return {curves_[e.curve], e.t0, e.t1};
  }
  return EdgeMap::Straight(vertices_[e.v_from].x, vertices_[e.v_to].x);
}

CurvedPolygon Mesh::GetShape(int element) const
{
  const Element &E = elements_[element];
  CurvedPolygon P;
  for (int i = 0; i < E.NumVertices(); i++)
  {
    const EdgeMap m = GetEdgeMap(E.edges[i]);
    P.edges.push_back(E.reversed[i] ? m.Reversed() : m);
  }
  return P;
}

std::vector<std::string> Mesh::CheckShapeRegularity(double rho) const
{
  std::vector<std::string> warnings;
  const Rule1D g = MapRule(GaussLegendre(8), 0.0, 1.0);
  for (const auto &E : elements_)
  {
    const CurvedPolygon P = GetShape(E.id);
    const double tol = rho * E.diameter;
    double clearance = std::numeric_limits<double>::infinity(), shortest = clearance;
    for (const auto &edge : P.edges)
    {
      double length = 0.0;
      for (int q = 0; q < g.Size(); q++)
      {
        length += g.w[q] * edge.Derivative(g.x[q]).norm();
      }
      shortest = std::min(shortest, length);
      const int ns = edge.IsCurved() ? 17 : 1;
      for (int i = 0; i < ns; i++)
      {
        const double s = (ns == 1) ? 0.5 : static_cast<double>(i) / (ns - 1);
        const Point x = edge.Eval(s), n = edge.RightNormal(s);
        clearance = std::min(clearance, (x - E.centroid).dot(n));
      }
    }
    if (clearance < tol)
    {
      std::ostringstream os;
      os << "element " << E.id << ": centroid clearance " << clearance << " < " << tol;
      warnings.push_back(os.str());
    }
    if (shortest < tol)
    {
      std::ostringstream os;
      os << "element " << E.id << ": edge length " << shortest << " < " << tol;
      warnings.push_back(os.str());
    }
  }
  return warnings;
}

Mesh BuildAnnulusMesh(double r0, double r1, int n_theta, int n_r)
{
  if (!(r0 > 0.0) || !(r1 > r0))
  {
    throw ConfigError("annulus radii must satisfy r1 > r0 > 0");
  }
  if (n_theta < 4 || n_r < 1)
  {
    throw ConfigError("annulus needs n_theta >= 4 and n_r >= 1");
  }
  MeshData d;
  d.curves.push_back(Curve::Circle(Point::Zero(), r0, Orientation::CW));
  d.curves.push_back(Curve::Circle(Point::Zero(), r1, Orientation::CCW));
  auto theta = [&](int j) { return 2.0 * std::numbers::pi * j / n_theta; };
  auto vid = [&](int i, int j) { return i * n_theta + (j % n_theta); };
  for (int i = 0; i <= n_r; i++)
  {
    const BoundaryTag tag = (i == 0)      ? BoundaryTag::GAMMA0
                            : (i == n_r) ? BoundaryTag::GAMMA
                                         : BoundaryTag::INTERIOR;
    const double r = (i == n_r) ? r1 : r0 + i * (r1 - r0) / n_r;
    for (int j = 0; j < n_theta; j++)
    {
      const Point x = (i == 0 || i == n_r) ? d.curves[i == 0 ? 0 : 1].Eval(theta(j))
                                           : Point(r * std::cos(theta(j)), r * std::sin(theta(j)));
      d.vertices.push_back({vid(i, j), x, tag});
    }
  }
  auto add_edge = [&](int a, int b, int curve, double t0, double t1, BoundaryTag tag)
  { d.edges.push_back({static_cast<int>(d.edges.size()), a, b, curve, t0, t1, tag}); };
  for (int i = 0; i < n_r; i++)
  {
    for (int j = 0; j < n_theta; j++)
    {
      add_edge(vid(i, j), vid(i + 1, j), -1, 0.0, 1.0, BoundaryTag::INTERIOR);
    }
  }
  for (int i = 0; i <= n_r; i++)
  {
    for (int j = 0; j < n_theta; j++)
    {
      if (i == 0 || i == n_r)
      {
        add_edge(vid(i, j), vid(i, j + 1), i == 0 ? 0 : 1, theta(j), theta(j + 1),
                 i == 0 ? BoundaryTag::GAMMA0 : BoundaryTag::GAMMA);
      }
      else
      {
        add_edge(vid(i, j), vid(i, j + 1), -1, 0.0, 1.0, BoundaryTag::INTERIOR);
      }
    }
  }
  for (int i = 0; i < n_r; i++)
  {
    for (int j = 0; j < n_theta; j++)
    {
      d.elements.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
    }
  }
  return Mesh(std::move(d));
}

Mesh BuildSquareRingMesh(double a0, double a1, int n_per_side, int n_layers)
{
  if (!(a0 > 0.0) || !(a1 > a0))
  {
    throw ConfigError("square ring half-widths must satisfy a1 > a0 > 0");
  }
  if (n_per_side < 1 || n_layers < 1)
  {
    throw ConfigError("square ring needs n_per_side >= 1 and n_layers >= 1");
  }
  const int np = 4 * n_per_side;
  // Counter-clockwise perimeter point m of the square of half-width a, from (-a, -a).
  auto perimeter = [&](double a, int m)
  {
    const int side = m / n_per_side;
    const double f = static_cast<double>(m % n_per_side) / n_per_side;
    const Point corners[4] = {{-a, -a}, {a, -a}, {a, a}, {-a, a}};
    const Point &p = corners[side], &q = corners[(side + 1) % 4];
    return Point(p + f * (q - p));
  };
  auto vid = [&](int l, int m) { return l * np + (m % np); };
  MeshData d;
  for (int l = 0; l <= n_layers; l++)
  {
    const BoundaryTag tag = (l == 0)           ? BoundaryTag::GAMMA0
                            : (l == n_layers) ? BoundaryTag::GAMMA
                                              : BoundaryTag::INTERIOR;
    const double f = static_cast<double>(l) / n_layers;
    for (int m = 0; m < np; m++)
    {
      const Point x = (l == n_layers) ? perimeter(a1, m)
                                      : Point((1.0 - f) * perimeter(a0, m) + f * perimeter(a1, m));
      d.vertices.push_back({vid(l, m), x, tag});
    }
  }
  auto add_edge = [&](int a, int b, BoundaryTag tag)
  { d.edges.push_back({static_cast<int>(d.edges.size()), a, b, -1, 0.0, 1.0, tag}); };
  for (int l = 0; l < n_layers; l++)
  {
    for (int m = 0; m < np; m++)
    {
      add_edge(vid(l, m), vid(l + 1, m), BoundaryTag::INTERIOR);
    }
  }
  for (int l = 0; l <= n_layers; l++)
  {
    const BoundaryTag tag = (l == 0)           ? BoundaryTag::GAMMA0
                            : (l == n_layers) ? BoundaryTag::GAMMA
                                              : BoundaryTag::INTERIOR;
    for (int m = 0; m < np; m++)
    {
      add_edge(vid(l, m), vid(l, m + 1), tag);
    }
  }
  for (int l = 0; l < n_layers; l++)
  {
    for (int m = 0; m < np; m++)
    {
      d.elements.push_back({vid(l, m), vid(l + 1, m), vid(l + 1, m + 1), vid(l, m + 1)});
    }
  }
  return Mesh(std::move(d));
}

Mesh Refine(const Mesh &mesh)
{
  MeshData d;
  d.curves = mesh.Curves();
  d.vertices = mesh.Vertices();
  d.level = mesh.Level() + 1;

  // Midpoint vertex and two children per edge.
  std::vector<int> mid(mesh.NumEdges());
  auto add_edge = [&](int a, int b, int curve, double t0, double t1, BoundaryTag tag)
  { d.edges.push_back({static_cast<int>(d.edges.size()), a, b, curve, t0, t1, tag}); };
  for (const auto &e : mesh.Edges())
  {
    const int m = static_cast<int>(d.vertices.size());
    mid[e.id] = m;
    if (e.IsCurved())
    {
      const double tm = 0.5 * (e.t0 + e.t1);
      d.vertices.push_back({m, mesh.Curves()[e.curve].Eval(tm), e.tag});
      add_edge(e.v_from, m, e.curve, e.t0, tm, e.tag);
      add_edge(m, e.v_to, e.curve, tm, e.t1, e.tag);
    }
    else
    {
      const Point x = 0.5 * (mesh.Vertices()[e.v_from].x + mesh.Vertices()[e.v_to].x);
      d.vertices.push_back({m, x, e.tag});
      add_edge(e.v_from, m, -1, 0.0, 1.0, e.tag);
      add_edge(m, e.v_to, -1, 0.0, 1.0, e.tag);
    }
  }

  for (const auto &E : mesh.Elements())
  {
    const int n = E.NumVertices();
    Point xc = Point::Zero();
    if (n == 4)
    {
      xc = TransfiniteMap(mesh.GetShape(E.id), 0.5, 0.5);
    }
    else
    {
      for (int v : E.vertices)
      {
        xc += mesh.Vertices()[v].x;
      }
      xc /= n;
    }
    const int c = static_cast<int>(d.vertices.size());
    d.vertices.push_back({c, xc, BoundaryTag::INTERIOR});
    for (int i = 0; i < n; i++)
    {
      add_edge(mid[E.edges[i]], c, -1, 0.0, 1.0, BoundaryTag::INTERIOR);
    }
    for (int i = 0; i < n; i++)
    {
      d.elements.push_back(
          {E.vertices[i], mid[E.edges[i]], c, mid[E.edges[(i + n - 1) % n]]});
    }
  }
  return Mesh(std::move(d));
}

std::vector<double> EdgeNodes(int k)
{
  std::vector<double> s{0.0};
  if (k >= 2)
  {
    const Rule1D &gl = GaussLobatto(k + 1);
    for (int i = 1; i < k; i++)
    {
      s.push_back(0.5 * (1.0 + gl.x[i]));
    }
  }
  s.push_back(1.0);
  return s;
}

DofMap::DofMap(const Mesh &mesh, int k) : k_(k)
{
  if (k < 1 || k > 3)
  {
    throw ConfigError("polynomial degree k = " + std::to_string(k) + " not supported");
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<DofRecord> interior, gamma;

  // Provisional encoding: (set, position) resolved once the interior count is known.
  enum class Set
  {
    I,
    G,
    C
  };
  auto add = [&](const DofRecord &r) -> std::pair<Set, int>
  {
    if (r.tag == BoundaryTag::GAMMA0)
    {
      constrained_.push_back(r);
      return {Set::C, static_cast<int>(constrained_.size()) - 1};
    }
    auto &list = (r.tag == BoundaryTag::GAMMA) ? gamma : interior;
    list.push_back(r);
    return {(r.tag == BoundaryTag::GAMMA) ? Set::G : Set::I, static_cast<int>(list.size()) - 1};
  };

  std::vector<std::pair<Set, int>> vdof(mesh.NumVertices());
  for (const auto &v : mesh.Vertices())
  {
    vdof[v.id] = add({DofKind::VERTEX, v.id, 0, v.x, v.tag});
  }
  const std::vector<double> nodes = EdgeNodes(k);
  std::vector<std::vector<std::pair<Set, int>>> edof(mesh.NumEdges());
  for (const auto &e : mesh.Edges())
  {
    const EdgeMap m = mesh.GetEdgeMap(e.id);
    for (int p = 0; p < k - 1; p++)
    {
      edof[e.id].push_back(add({DofKind::EDGE_POINT, e.id, p, m.Eval(nodes[p + 1]), e.tag}));
    }
  }
  const int nm = k * (k - 1) / 2;
  std::vector<std::vector<std::pair<Set, int>>> mdof(mesh.NumElements());
  for (const auto &E : mesh.Elements())
  {
    for (int a = 0; a < nm; a++)
    {
      mdof[E.id].push_back(
          add({DofKind::MOMENT, E.id, a, Point(nan, nan), BoundaryTag::INTERIOR}));
    }
  }

  n_interior_ = static_cast<int>(interior.size());
  n_gamma_ = static_cast<int>(gamma.size());
  unknowns_ = std::move(interior);
  unknowns_.insert(unknowns_.end(), gamma.begin(), gamma.end());
  auto encode = [&](std::pair<Set, int> p)
  {
    switch (p.first)
    {
      case Set::I:
        return p.second;
      case Set::G:
        return n_interior_ + p.second;
      case Set::C:
        break;
    }
    return -1 - p.second;
  };

  vertex_dof_.resize(mesh.NumVertices());
  for (int v = 0; v < mesh.NumVertices(); v++)
  {
    vertex_dof_[v] = encode(vdof[v]);
  }
  edge_dofs_.resize(mesh.NumEdges());
  for (int e = 0; e < mesh.NumEdges(); e++)
  {
    for (auto p : edof[e])
    {
      edge_dofs_[e].push_back(encode(p));
    }
  }
  element_dofs_.resize(mesh.NumElements());
  for (const auto &E : mesh.Elements())
  {
    auto &ld = element_dofs_[E.id];
    for (int v : E.vertices)
    {
      ld.push_back(vertex_dof_[v]);
    }
    for (int i = 0; i < E.NumVertices(); i++)
    {
      const auto &ed = edge_dofs_[E.edges[i]];
      if (E.reversed[i])
      {
        ld.insert(ld.end(), ed.rbegin(), ed.rend());
      }
      else
      {
        ld.insert(ld.end(), ed.begin(), ed.end());
      }
    }
    for (auto p : mdof[E.id])
    {
      ld.push_back(encode(p));
    }
  }
  edge_vertices_.resize(mesh.NumEdges());
  for (const auto &e : mesh.Edges())
  {
    edge_vertices_[e.id] = {e.v_from, e.v_to};
  }
}

std::vector<int> DofMap::EdgeDofs(int edge) const
{
  std::vector<int> out{vertex_dof_[edge_vertices_[edge].first]};
  out.insert(out.end(), edge_dofs_[edge].begin(), edge_dofs_[edge].end());
  out.push_back(vertex_dof_[edge_vertices_[edge].second]);
  return out;
}

}  // namespace cvembem
