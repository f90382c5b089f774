// SPDX-License-Identifier: Apache-2.0

#include "cvembem/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <Eigen/LU>
#include "cvembem/errors.hpp"

namespace cvembem
{

namespace
{

// P_n(x) and P_n'(x) by the three-term recurrence.
void Legendre(int n, double x, double &p, double &dp)
{
  double p0 = 1.0, p1 = x;
  if (n == 0)
  {
    p = 1.0;
    dp = 0.0;
    return;
  }
  for (int k = 2; k <= n; k++)
  {
    const double pk = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  p = p1;
  dp = n * (x * p1 - p0) / (x * x - 1.0);
}

Rule1D ComputeGaussLegendre(int n)
{
  Rule1D rule;
  rule.x.resize(n);
  rule.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; i++)
  {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double p, dp;
    for (int it = 0; it < 100; it++)
    {
      Legendre(n, x, p, dp);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1.0e-16)
      {
        break;
      }
    }
    Legendre(n, x, p, dp);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.x[i] = -x;
    rule.x[n - 1 - i] = x;
    rule.w[i] = rule.w[n - 1 - i] = w;
  }
  if (n % 2 == 1)
  {
    rule.x[n / 2] = 0.0;
  }
  return rule;
}

Rule1D ComputeGaussLobatto(int n)
{
  // Interior nodes are the roots of P'_{n-1}; Newton on P'_{n-1} using the Legendre ODE for
  // its derivative.
  const int m = n - 1;
  Rule1D rule;
  rule.x.resize(n);
  rule.w.resize(n);
  rule.x[0] = -1.0;
  rule.x[n - 1] = 1.0;
  for (int i = 1; i <= (n - 1) / 2; i++)
  {
    double x = std::cos(std::numbers::pi * i / m);
    for (int it = 0; it < 100; it++)
    {
      double p, dp;
      Legendre(m, x, p, dp);
      const double d2p = (2.0 * x * dp - m * (m + 1) * p) / (1.0 - x * x);
      const double dx = dp / d2p;
      x -= dx;
      if (std::abs(dx) < 1.0e-16)
      {
        break;
      }
    }
    rule.x[i] = -x;
    rule.x[n - 1 - i] = x;
  }
  if (n % 2 == 1)
  {
    rule.x[n / 2] = 0.0;
  }
  for (int i = 0; i < n; i++)
  {
    double p, dp;
    if (std::abs(rule.x[i]) == 1.0)
    {
      p = 1.0;
    }
    else
    {
      Legendre(m, rule.x[i], p, dp);
    }
    rule.w[i] = 2.0 / (n * m * p * p);
  }
  return rule;
}

template <typename F>
const Rule1D &Cached(std::map<int, std::unique_ptr<Rule1D>> &cache, int n, F &&compute)
{
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto &slot = cache[n];
  if (!slot)
  {
    slot = std::make_unique<Rule1D>(compute(n));
  }
  return *slot;
}

double Cross(const Point &a, const Point &b)
{
  return a.x() * b.y() - a.y() * b.x();
}

}  // namespace

const Rule1D &GaussLegendre(int n)
{
  if (n < 1 || n > 64)
  {
    throw DomainError("Gauss-Legendre rule supports 1 to 64 points");
  }
  static std::map<int, std::unique_ptr<Rule1D>> cache;
  return Cached(cache, n, ComputeGaussLegendre);
}

const Rule1D &GaussLobatto(int n)
{
  if (n < 2)
  {
    throw DomainError("Gauss-Lobatto rule needs at least two points");
  }
  static std::map<int, std::unique_ptr<Rule1D>> cache;
  return Cached(cache, n, ComputeGaussLobatto);
}

Rule1D MapRule(const Rule1D &rule, double a, double b)
{
  Rule1D out;
  out.x.resize(rule.x.size());
  out.w.resize(rule.w.size());
  const double c = 0.5 * (a + b), r = 0.5 * (b - a);
  for (std::size_t i = 0; i < rule.x.size(); i++)
  {
    out.x[i] = c + r * rule.x[i];
    out.w[i] = r * rule.w[i];
  }
  return out;
}

Rule1D QSmooth(const Rule1D &rule01, int q, Endpoint endpoint)
{
  if (q < 3 || q % 2 == 0)
  {
    throw ConfigError("smoothing exponent must be odd and at least 3");
  }
  Rule1D out = rule01;
  for (int i = 0; i < out.Size(); i++)
  {
    const double t = (endpoint == Endpoint::LEFT) ? out.x[i] : 1.0 - out.x[i];
    const double s = std::pow(t, q);
    out.w[i] *= q * std::pow(t, q - 1);
    out.x[i] = (endpoint == Endpoint::LEFT) ? s : 1.0 - s;
  }
  return out;
}

Rule1D SmoothedGauss(int n, int q, Endpoint endpoint)
{
  return QSmooth(MapRule(GaussLegendre(n), 0.0, 1.0), q, endpoint);
}

Point TransfiniteMap(const CurvedPolygon &E, double u, double v, Eigen::Matrix2d *jac)
{
  if (E.NumVertices() != 4)
  {
    throw AssemblyError("transfinite map requires a quadrilateral");
  }
  const auto &c = E.edges;
  const Point x0 = c[0].Start(), x1 = c[1].Start(), x2 = c[2].Start(), x3 = c[3].Start();
  const Point B = c[0].Eval(u), R = c[1].Eval(v), T = c[2].Eval(1.0 - u),
              L = c[3].Eval(1.0 - v);
  const Point F = (1.0 - v) * B + v * T + (1.0 - u) * L + u * R -
                  ((1.0 - u) * (1.0 - v) * x0 + u * (1.0 - v) * x1 + u * v * x2 +
                   (1.0 - u) * v * x3);
  if (jac)
  {
    const Point Fu = (1.0 - v) * c[0].Derivative(u) - v * c[2].Derivative(1.0 - u) - L + R -
                     (-(1.0 - v) * x0 + (1.0 - v) * x1 + v * x2 - v * x3);
    const Point Fv = -B + T - (1.0 - u) * c[3].Derivative(1.0 - v) + u * c[1].Derivative(v) -
                     (-(1.0 - u) * x0 - u * x1 + u * x2 + (1.0 - u) * x3);
    jac->col(0) = Fu;
    jac->col(1) = Fv;
  }
  return F;
}

Rule2D ElementRule(const CurvedPolygon &E, int n)
{
  const Rule1D g = MapRule(GaussLegendre(n), 0.0, 1.0);
  Rule2D rule;
  const int nv = E.NumVertices();
  if (nv < 3)
  {
    throw AssemblyError("element needs at least three vertices");
  }
  if (nv == 4)
  {
    rule.x.reserve(n * n);
    rule.w.reserve(n * n);
    Eigen::Matrix2d J;
    for (int i = 0; i < n; i++)
    {
      for (int j = 0; j < n; j++)
      {
        const Point x = TransfiniteMap(E, g.x[i], g.x[j], &J);
        const double det = J.determinant();
        if (!(det > 0.0))
        {
          throw AssemblyError("element map is not orientation preserving");
        }
        rule.x.push_back(x);
        rule.w.push_back(g.w[i] * g.w[j] * det);
      }
    }
    return rule;
  }

  // Fan of collapsed quadrilaterals about the vertex average.
  Point C = Point::Zero();
  for (int e = 0; e < nv; e++)
  {
    C += E.Vertex(e);
  }
  C /= nv;
  rule.x.reserve(nv * n * n);
  rule.w.reserve(nv * n * n);
  for (int e = 0; e < nv; e++)
  {
    for (int i = 0; i < n; i++)
    {
      const Point c = E.edges[e].Eval(g.x[i]), dc = E.edges[e].Derivative(g.x[i]);
      const double det = Cross(c - C, dc);
      if (!(det > 0.0))
      {
        throw AssemblyError("element is not star-shaped about its vertex average");
      }
      for (int j = 0; j < n; j++)
      {
        rule.x.push_back(C + g.x[j] * (c - C));
        rule.w.push_back(g.w[i] * g.w[j] * g.x[j] * det);
      }
    }
  }
  return rule;
}

ElementMetrics ComputeMetrics(const CurvedPolygon &E)
{
  const Rule2D rule = ElementRule(E, 8);
  ElementMetrics m{0.0, Point::Zero(), 0.0};
  for (int q = 0; q < rule.Size(); q++)
  {
    m.area += rule.w[q];
    m.centroid += rule.w[q] * rule.x[q];
  }
  m.centroid /= m.area;

  std::vector<Point> samples;
  for (const auto &edge : E.edges)
  {
    const int ns = edge.IsCurved() ? 64 : 1;
    for (int i = 0; i < ns; i++)
    {
      samples.push_back(edge.Eval(static_cast<double>(i) / ns));
    }
  }
  for (std::size_t i = 0; i < samples.size(); i++)
  {
    for (std::size_t j = i + 1; j < samples.size(); j++)
    {
      m.diameter = std::max(m.diameter, (samples[i] - samples[j]).norm());
    }
  }
  return m;
}

}  // namespace cvembem
