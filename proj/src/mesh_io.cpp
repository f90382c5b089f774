// SPDX-License-Identifier: Apache-2.0

#include <fstream>
#include <iomanip>
#include <sstream>
#include "cvembem/errors.hpp"
#include "cvembem/mesh.hpp"

namespace cvembem
{

namespace
{

BoundaryTag ParseTag(const std::string &s, int line)
{
  if (s == "interior")
  {
    return BoundaryTag::INTERIOR;
  }
  if (s == "gamma0")
  {
    return BoundaryTag::GAMMA0;
  }
  if (s == "gamma")
  {
    return BoundaryTag::GAMMA;
  }
  throw ParseError("unknown boundary tag '" + s + "'", line);
}

// Line reader that skips blank lines and '#' comments and tracks line numbers.
class LineReader
{
public:
  explicit LineReader(std::istream &is) : is_(is) {}

  std::istringstream Next()
  {
    std::string s;
    while (std::getline(is_, s))
    {
      line_++;
      const auto p = s.find_first_not_of(" \t\r");
      if (p != std::string::npos && s[p] != '#')
      {
        return std::istringstream(s);
      }
    }
    throw ParseError("unexpected end of file", line_);
  }

  int Line() const { return line_; }

private:
  std::istream &is_;
  int line_ = 0;
};

int ReadCount(LineReader &in, const std::string &keyword)
{
  auto ss = in.Next();
  std::string kw;
  long long n = -1;
  if (!(ss >> kw >> n) || kw != keyword || n < 0)
  {
    throw ParseError("expected '" + keyword + " <n>'", in.Line());
  }
  return static_cast<int>(n);
}

}  // namespace

void WriteMesh(const Mesh &mesh, std::ostream &os)
{
  os << std::setprecision(17);
  os << "mesh v1\n";
  os << "level " << mesh.Level() << "\n";
  os << "curves " << mesh.Curves().size() << "\n";
  for (const auto &c : mesh.Curves())
  {
    if (!c.IsCircle())
    {
      throw ConfigError("only circle curves are stored in mesh files");
    }
    os << "circle " << c.Center().x() << " " << c.Center().y() << " " << c.Radius() << " "
       << (c.GetOrientation() == Orientation::CCW ? "ccw" : "cw") << "\n";
  }
  os << "vertices " << mesh.NumVertices() << "\n";
  for (const auto &v : mesh.Vertices())
  {
    os << v.id << " " << v.x.x() << " " << v.x.y() << " " << TagName(v.tag) << "\n";
  }
  os << "edges " << mesh.NumEdges() << "\n";
  for (const auto &e : mesh.Edges())
  {
    os << e.id << " " << e.v_from << " " << e.v_to << " ";
    if (e.IsCurved())
    {
      os << "curved " << e.curve << " " << e.t0 << " " << e.t1;
    }
    else
    {
      os << "straight";
    }
    os << " " << TagName(e.tag) << "\n";
  }
  os << "elements " << mesh.NumElements() << "\n";
  for (const auto &E : mesh.Elements())
  {
    os << E.id << " " << E.NumVertices();
    for (int v : E.vertices)
    {
      os << " " << v;
    }
    os << "\n";
  }
}

Mesh ReadMesh(std::istream &is)
{
  LineReader in(is);
  MeshData d;
  {
    auto ss = in.Next();
    std::string a, b, extra;
    if (!(ss >> a >> b) || a != "mesh" || b != "v1" || (ss >> extra))
    {
      throw ParseError("expected header 'mesh v1'", in.Line());
    }
  }

  auto ss = in.Next();
  std::string kw;
  ss >> kw;
  if (kw == "level")
  {
    if (!(ss >> d.level) || d.level < 0)
    {
      throw ParseError("invalid level", in.Line());
    }
    ss = in.Next();
    ss >> kw;
  }
  long long n;
  if (kw != "curves" || !(ss >> n) || n < 0)
  {
    throw ParseError("expected 'curves <n>'", in.Line());
  }
  for (long long i = 0; i < n; i++)
  {
    auto cs = in.Next();
    std::string kind, orient;
    double cx, cy, r;
    if (!(cs >> kind >> cx >> cy >> r >> orient) || kind != "circle" ||
        (orient != "ccw" && orient != "cw"))
    {
      throw ParseError("expected 'circle cx cy r ccw|cw'", in.Line());
    }
    try
    {
      d.curves.push_back(Curve::Circle(Point(cx, cy), r,
                                       orient == "ccw" ? Orientation::CCW : Orientation::CW));
    }
    catch (const DomainError &e)
    {
      throw ParseError(e.what(), in.Line());
    }
  }

  const int nv = ReadCount(in, "vertices");
  for (int i = 0; i < nv; i++)
  {
    auto vs = in.Next();
    int id;
    double x, y;
    std::string tag;
    if (!(vs >> id >> x >> y >> tag))
    {
      throw ParseError("expected 'id x y tag'", in.Line());
    }
    if (id != i)
    {
      throw ParseError("vertex ids must be contiguous from 0", in.Line());
    }
    d.vertices.push_back({id, Point(x, y), ParseTag(tag, in.Line())});
  }

  const int ne = ReadCount(in, "edges");
  for (int i = 0; i < ne; i++)
  {
    auto es = in.Next();
    int id, a, b;
    std::string shape, tag;
    if (!(es >> id >> a >> b >> shape))
    {
      throw ParseError("expected 'id v0 v1 straight|curved ...'", in.Line());
    }
    if (id != i)
    {
      throw ParseError("edge ids must be contiguous from 0", in.Line());
    }
    if (a < 0 || a >= nv || b < 0 || b >= nv)
    {
      throw ParseError("edge references unknown vertex", in.Line());
    }
    Edge e{id, a, b, -1, 0.0, 1.0, BoundaryTag::INTERIOR};
    if (shape == "curved")
    {
      if (!(es >> e.curve >> e.t0 >> e.t1))
      {
        throw ParseError("expected '<curve_id> <t0> <t1>'", in.Line());
      }
      if (e.curve < 0 || e.curve >= static_cast<int>(d.curves.size()))
      {
        throw ParseError("edge references unknown curve " + std::to_string(e.curve),
                         in.Line());
      }
    }
    else if (shape != "straight")
    {
      throw ParseError("unknown edge shape '" + shape + "'", in.Line());
    }
    if (!(es >> tag))
    {
      throw ParseError("missing edge tag", in.Line());
    }
    e.tag = ParseTag(tag, in.Line());
    d.edges.push_back(e);
  }

  const int nel = ReadCount(in, "elements");
  for (int i = 0; i < nel; i++)
  {
    auto es = in.Next();
    int id, k;
    if (!(es >> id >> k) || k < 3)
    {
      throw ParseError("expected 'id nv v0 ... v_{nv-1}' with nv >= 3", in.Line());
    }
    if (id != i)
    {
      throw ParseError("element ids must be contiguous from 0", in.Line());
    }
    std::vector<int> vs(k);
    for (auto &v : vs)
    {
      if (!(es >> v))
      {
        throw ParseError("missing element vertex", in.Line());
      }
      if (v < 0 || v >= nv)
      {
        throw ParseError("element references unknown vertex", in.Line());
      }
    }
    d.elements.push_back(std::move(vs));
  }

  try
  {
    return Mesh(std::move(d));
  }
  catch (const std::exception &e)
  {
    throw ParseError(std::string("invalid mesh: ") + e.what(), in.Line());
  }
}

void WriteMesh(const Mesh &mesh, const std::string &path)
{
  std::ofstream os(path);
  if (!os)
  {
    throw ConfigError("cannot open '" + path + "' for writing");
  }
  WriteMesh(mesh, os);
  if (!os)
  {
    throw ConfigError("error writing '" + path + "'");
  }
}

Mesh ReadMesh(const std::string &path)
{
  std::ifstream is(path);
  if (!is)
  {
    throw ConfigError("cannot open '" + path + "'");
  }
  return ReadMesh(is);
}

}  // namespace cvembem
