// SPDX-License-Identifier: Apache-2.0

#include "cvembem/bem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <string>
#include "cvembem/errors.hpp"
#include "cvembem/quadrature.hpp"
#include "cvembem/specfun.hpp"

namespace cvembem
{

namespace
{

constexpr double pi = std::numbers::pi;
constexpr int max_points = 64;
constexpr int min_outer = 9, min_inner = 8;

// Graded rule for the singular variable: a q-smoothed piece on [0, 2^-levels], then dyadic
// pieces up to 1, each resolved to about machine precision for log-type integrands.
constexpr int graded_levels = 8;
constexpr int graded_smoothing = 7;
constexpr int graded_first_points = 12;
constexpr int graded_piece_points = 10;

// Smallest n for which the n-point Gauss error bound for exp(i kappa L x) on a panel of
// length L, (e kappa L / 4n)^(2n), is below 1e-16.
int OscillationPoints(double kl)
{
  for (int n = 1; n < max_points; n++)
  {
    const double base = std::numbers::e * kl / (4.0 * n);
    if (base < 1.0 && 2.0 * n * std::log(base) < std::log(1.0e-16))
    {
      return n;
    }
  }
  return max_points;
}

// Points so that a kernel singular at distance d from a panel of length L is integrated to
// about 1e-15: convergence factor rho^(-2n) for the Bernstein ellipse through the singularity.
int NearPoints(double d, double L)
{
  if (!(d > 0.0))
  {
    return max_points;
  }
  const double a = 1.0 + 2.0 * d / L;
  const double rho = a + std::sqrt(a * a - 1.0);
  return std::min(max_points, static_cast<int>(std::ceil(15.0 * std::log(10.0) / (2.0 * std::log(rho)))));
}

int Clamp(int n)
{
  return std::min(n, max_points);
}

Rule1D GradedRule(double kl)
{
  Rule1D r;
  const double u0 = std::ldexp(1.0, -graded_levels);
  const Rule1D first =
      QSmooth(MapRule(GaussLegendre(graded_first_points), 0.0, 1.0), graded_smoothing, Endpoint::LEFT);
  for (int i = 0; i < first.Size(); i++)
  {
    r.x.push_back(u0 * first.x[i]);
    r.w.push_back(u0 * first.w[i]);
  }
  for (int j = graded_levels; j > 0; j--)
  {
    const double a = std::ldexp(1.0, -j), b = 2.0 * a;
    const int n = Clamp(std::max(graded_piece_points, OscillationPoints(kl * (b - a))));
    const Rule1D piece = MapRule(GaussLegendre(n), a, b);
    r.x.insert(r.x.end(), piece.x.begin(), piece.x.end());
    r.w.insert(r.w.end(), piece.w.begin(), piece.w.end());
  }
  return r;
}

// Lagrange basis on the k + 1 edge nodes; k <= 3.
struct Lagrange
{
  int k;
  std::vector<double> nodes;

  explicit Lagrange(int k_) : k(k_), nodes(EdgeNodes(k_)) {}

  void Eval(double s, double *l) const
  {
    for (int m = 0; m <= k; m++)
    {
      double v = 1.0;
      for (int j = 0; j <= k; j++)
      {
        if (j != m)
        {
          v *= (s - nodes[j]) / (nodes[m] - nodes[j]);
        }
      }
      l[m] = v;
    }
  }
};

// Kernel values for d = x - y and the unnormalized right normal nys = |y'| n_y.
inline void Kernel(const Point &d, const Point &nys, double kappa, Complex &g, Complex &dgn)
{
  const double r = d.norm();
  if (!(r > 0.0))
  {
    throw AssemblyError("boundary quadrature node hit the kernel singularity");
  }
  if (kappa == 0.0)
  {
    g = -std::log(r) / (2.0 * pi);
    dgn = d.dot(nys) / (2.0 * pi * r * r);
    return;
  }
  const BesselPair b = BesselJY01(kappa * r);
  g = Complex(-0.25 * b.y0, 0.25 * b.j0);
  const double c = 0.25 * kappa * d.dot(nys) / r;
  dgn = Complex(-c * b.y1, c * b.j1);
}

struct PanelInfo
{
  double length;
  std::vector<Point> samples;
};

PanelInfo Info(const Panel &p)
{
  PanelInfo info{0.0, {}};
  const Rule1D g = MapRule(GaussLegendre(8), 0.0, 1.0);
  for (int q = 0; q < g.Size(); q++)
  {
    info.length += g.w[q] * p.map.Derivative(g.x[q]).norm();
  }
  for (int i = 0; i <= 8; i++)
  {
    info.samples.push_back(p.map.Eval(i / 8.0));
  }
  return info;
}

double Distance(const PanelInfo &a, const PanelInfo &b)
{
  double d = std::numeric_limits<double>::infinity();
  for (const auto &x : a.samples)
  {
    for (const auto &y : b.samples)
    {
      d = std::min(d, (x - y).norm());
    }
  }
  // Samples are L/8 apart; the true distance can be smaller by up to half of that.
  return d - 0.0625 * std::max(a.length, b.length);
}

class PairIntegrator
{
public:
  PairIntegrator(const Panel &P, const Panel &Q, int k, double kappa, Eigen::MatrixXcd &V,
                 Eigen::MatrixXcd &K)
    : P_(P), Q_(Q), k_(k), kappa_(kappa), lag_(k), V_(V), K_(K)
  {
  }

  // Adds w * kernel(d) * Phi_i(theta) Phi_j(s) |x'| (and |y'| for V) with d = x(theta) - y(s).
  void Add(double theta, double s, const Point &d, double w)
  {
    double li[4], lj[4];
    lag_.Eval(theta, li);
    lag_.Eval(s, lj);
    const double jx = P_.map.Derivative(theta).norm();
    const Point yd = Q_.map.Derivative(s);
    const Point nys(yd.y(), -yd.x());
    Complex g, dgn;
    Kernel(d, nys, kappa_, g, dgn);
    const Complex gv = (w * jx * yd.norm()) * g, gk = (w * jx) * dgn;
    for (int i = 0; i <= k_; i++)
    {
      for (int j = 0; j <= k_; j++)
      {
        const double l = li[i] * lj[j];
        V_(i, j) += l * gv;
        K_(i, j) += l * gk;
      }
    }
  }

private:
  const Panel &P_, &Q_;
  int k_;
  double kappa_;
  Lagrange lag_;
  Eigen::MatrixXcd &V_, &K_;
};

enum class Relation
{
  SAME,
  P_THEN_Q,  // P ends where Q starts.
  Q_THEN_P,  // Q ends where P starts.
  FAR
};

void IntegrateSame(const Panel &P, const PanelInfo &info, double kappa, PairIntegrator &acc)
{
  // theta - s = +-u; the log singularity sits at u = 0 only, and the remaining variable runs
  // over [0, 1 - u].
  const double kl = kappa * info.length;
  const Rule1D U = GradedRule(kl);
  const int ns = Clamp(std::max(min_inner, OscillationPoints(kl)));
  for (int a = 0; a < U.Size(); a++)
  {
    const double u = U.x[a];
    const Rule1D S = MapRule(GaussLegendre(ns), 0.0, 1.0 - u);
    for (int b = 0; b < S.Size(); b++)
    {
      const double s = S.x[b], w = U.w[a] * S.w[b];
      const Point chord = P.map.Chord(s, u);  // x(s + u) - x(s).
      acc.Add(s + u, s, chord, w);
      acc.Add(s, s + u, Point(-chord), w);
    }
  }
}

void IntegrateAdjacent(const Panel &P, const Panel &Q, const PanelInfo &ip, const PanelInfo &iq,
                       bool p_then_q, double kappa, PairIntegrator &acc)
{
  // Local coordinates a, b measured from the shared corner along P and Q; Duffy split of the
  // unit square into the triangles b <= a and a < b.
  const double kl = kappa * std::max(ip.length, iq.length);
  const Rule1D U = GradedRule(kl);
  const Rule1D W = MapRule(GaussLegendre(Clamp(std::max(10, OscillationPoints(kl)))), 0.0, 1.0);
  for (int i = 0; i < U.Size(); i++)
  {
    const double u = U.x[i];
    for (int j = 0; j < W.Size(); j++)
    {
      const double v = W.x[j], w = U.w[i] * W.w[j] * u;
      for (int tri = 0; tri < 2; tri++)
      {
        const double a = (tri == 0) ? u : u * v, b = (tri == 0) ? u * v : u;
        if (p_then_q)
        {
          // x = P(1 - a), y = Q(b), shared corner P(1) = Q(0).
          const Point d = P.map.Chord(1.0, -a) - Q.map.Chord(0.0, b);
          acc.Add(1.0 - a, b, d, w);
        }
        else
        {
          // x = P(a), y = Q(1 - b), shared corner P(0) = Q(1).
          const Point d = P.map.Chord(0.0, a) - Q.map.Chord(1.0, -b);
          acc.Add(a, 1.0 - b, d, w);
        }
      }
    }
  }
}

void IntegrateFar(const Panel &P, const Panel &Q, const PanelInfo &ip, const PanelInfo &iq,
                  double kappa, PairIntegrator &acc)
{
  const double d = Distance(ip, iq);
  const int no = Clamp(std::max({min_outer, NearPoints(d, ip.length), OscillationPoints(kappa * ip.length)}));
  const int ni = Clamp(std::max({min_inner, NearPoints(d, iq.length), OscillationPoints(kappa * iq.length)}));
  const Rule1D O = MapRule(GaussLegendre(no), 0.0, 1.0);
  const Rule1D I = MapRule(GaussLegendre(ni), 0.0, 1.0);
  std::vector<Point> y(I.Size());
  for (int j = 0; j < I.Size(); j++)
  {
    y[j] = Q.map.Eval(I.x[j]);
  }
  for (int i = 0; i < O.Size(); i++)
  {
    const Point x = P.map.Eval(O.x[i]);
    for (int j = 0; j < I.Size(); j++)
    {
      acc.Add(O.x[i], I.x[j], x - y[j], O.w[i] * I.w[j]);
    }
  }
}

Relation Relate(int p, int q, int n)
{
  if (p == q)
  {
    return Relation::SAME;
  }
  if ((p + 1) % n == q)
  {
    return Relation::P_THEN_Q;
  }
  if ((q + 1) % n == p)
  {
    return Relation::Q_THEN_P;
  }
  return Relation::FAR;
}

void PairBlocks(const BoundaryMesh &bm, const std::vector<PanelInfo> &info, int p, int q,
                double kappa, Eigen::MatrixXcd &V, Eigen::MatrixXcd &K)
{
  const int k = bm.Degree();
  V = Eigen::MatrixXcd::Zero(k + 1, k + 1);
  K = Eigen::MatrixXcd::Zero(k + 1, k + 1);
  const Panel &P = bm.Panels()[p], &Q = bm.Panels()[q];
  PairIntegrator acc(P, Q, k, kappa, V, K);
  switch (Relate(p, q, bm.NumPanels()))
  {
    case Relation::SAME:
      IntegrateSame(P, info[p], kappa, acc);
      break;
    case Relation::P_THEN_Q:
      IntegrateAdjacent(P, Q, info[p], info[q], true, kappa, acc);
      break;
    case Relation::Q_THEN_P:
      IntegrateAdjacent(P, Q, info[p], info[q], false, kappa, acc);
      break;
    case Relation::FAR:
      IntegrateFar(P, Q, info[p], info[q], kappa, acc);
      break;
  }
}

std::vector<PanelInfo> AllInfo(const BoundaryMesh &bm)
{
  std::vector<PanelInfo> info;
  for (const auto &p : bm.Panels())
  {
    info.push_back(Info(p));
  }
  return info;
}

void CheckKappa(double kappa)
{
  if (!(kappa >= 0.0) || !std::isfinite(kappa))
  {
    throw ConfigError("wavenumber must be finite and non-negative");
  }
}

}  // namespace

BoundaryMesh::BoundaryMesh(const Mesh &mesh, const DofMap &dofs)
  : k_(dofs.Degree()), num_dofs_(dofs.NumGamma())
{
  const int nI = dofs.NumInterior();
  // Gamma edges in the traversal of their element: the domain is on the left.
  std::map<int, int> by_start;
  std::vector<Panel> loose;
  std::vector<std::pair<int, int>> ends;
  for (const auto &E : mesh.Elements())
  {
    for (int i = 0; i < E.NumVertices(); i++)
    {
      const Edge &e = mesh.Edges()[E.edges[i]];
      if (e.tag != BoundaryTag::GAMMA)
      {
        continue;
      }
      const EdgeMap m = mesh.GetEdgeMap(e.id);
      std::vector<int> ed = dofs.EdgeDofs(e.id);
      if (E.reversed[i])
      {
        std::reverse(ed.begin(), ed.end());
      }
      for (auto &d : ed)
      {
        d -= nI;
      }
      const int start = E.reversed[i] ? e.v_to : e.v_from;
      const int end = E.reversed[i] ? e.v_from : e.v_to;
      if (!by_start.emplace(start, static_cast<int>(loose.size())).second)
      {
        throw ConfigError("Gamma is not a simple closed curve");
      }
      loose.push_back({E.reversed[i] ? m.Reversed() : m, ed});
      ends.push_back({start, end});
    }
  }
  if (loose.size() < 3)
  {
    throw ConfigError("Gamma needs at least three panels");
  }
  int current = 0;
  std::vector<bool> used(loose.size(), false);
  for (std::size_t n = 0; n < loose.size(); n++)
  {
    if (used[current])
    {
      throw ConfigError("Gamma is not a single closed curve");
    }
    used[current] = true;
    panels_.push_back(loose[current]);
    auto it = by_start.find(ends[current].second);
    if (it == by_start.end())
    {
      throw ConfigError("Gamma is not closed");
    }
    current = it->second;
  }
  if (current != 0)
  {
    throw ConfigError("Gamma is not a single closed curve");
  }
  Validate();
}

BoundaryMesh::BoundaryMesh(std::vector<Panel> panels, int k, int num_dofs)
  : panels_(std::move(panels)), k_(k), num_dofs_(num_dofs)
{
  if (panels_.size() < 3)
  {
    throw ConfigError("Gamma needs at least three panels");
  }
  Validate();
}

void BoundaryMesh::Validate() const
{
  const int n = NumPanels();
  double scale = 0.0;
  for (const auto &p : panels_)
  {
    scale = std::max(scale, p.map.Start().norm());
  }
  for (int i = 0; i < n; i++)
  {
    const Panel &p = panels_[i], &q = panels_[(i + 1) % n];
    if ((p.map.End() - q.map.Start()).norm() > 1e-12 * std::max(1.0, scale))
    {
      throw ConfigError("Gamma is not closed at panel " + std::to_string(i));
    }
    if (static_cast<int>(p.dofs.size()) != k_ + 1 || p.dofs.back() != q.dofs.front())
    {
      throw ConfigError("Gamma panel dofs are inconsistent at panel " + std::to_string(i));
    }
    for (int d : p.dofs)
    {
      if (d < 0 || d >= num_dofs_)
      {
        throw ConfigError("Gamma panel dof out of range");
      }
    }
  }
}

BoundaryMesh BoundaryMesh::Reversed() const
{
  std::vector<Panel> rev;
  for (auto it = panels_.rbegin(); it != panels_.rend(); ++it)
  {
    Panel p{it->map.Reversed(), std::vector<int>(it->dofs.rbegin(), it->dofs.rend())};
    rev.push_back(std::move(p));
  }
  return BoundaryMesh(std::move(rev), k_, num_dofs_);
}

void PanelPairBlocks(const BoundaryMesh &bm, int p, int q, double kappa, Eigen::MatrixXcd &V,
                     Eigen::MatrixXcd &K)
{
  CheckKappa(kappa);
  const std::vector<PanelInfo> info = AllInfo(bm);
  PairBlocks(bm, info, p, q, kappa, V, K);
}

BemMatrices AssembleBem(const BoundaryMesh &bm, double kappa)
{
  CheckKappa(kappa);
  const int n = bm.NumDofs(), k = bm.Degree();
  const std::vector<PanelInfo> info = AllInfo(bm);
  BemMatrices out{Eigen::MatrixXcd::Zero(n, n), Eigen::MatrixXcd::Zero(n, n), kappa};
  Eigen::MatrixXcd V, K;
  for (int p = 0; p < bm.NumPanels(); p++)
  {
    const auto &dp = bm.Panels()[p].dofs;
    for (int q = 0; q < bm.NumPanels(); q++)
    {
      const auto &dq = bm.Panels()[q].dofs;
      PairBlocks(bm, info, p, q, kappa, V, K);
      for (int i = 0; i <= k; i++)
      {
        for (int j = 0; j <= k; j++)
        {
          out.V(dp[i], dq[j]) += V(i, j);
          out.K(dp[i], dq[j]) += K(i, j);
        }
      }
    }
  }
  // The single-layer kernel is symmetric; average the two quadratures of each entry.
  out.V = (0.5 * (out.V + out.V.transpose())).eval();
  return out;
}

Eigen::MatrixXcd AssembleV(const BoundaryMesh &bm, double kappa)
{
  return AssembleBem(bm, kappa).V;
}

Eigen::MatrixXcd AssembleK(const BoundaryMesh &bm, double kappa)
{
  return AssembleBem(bm, kappa).K;
}

std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> NrbcRowBlock(const BemMatrices &bem,
                                                           const SparseMatrixR &Q_gamma)
{
  if (Q_gamma.rows() != bem.K.rows() || Q_gamma.cols() != bem.K.cols() ||
      bem.V.rows() != bem.K.rows())
  {
    throw AssemblyError("boundary block dimensions do not match");
  }
  Eigen::MatrixXcd left = -bem.K;
  for (int c = 0; c < Q_gamma.outerSize(); c++)
  {
    for (SparseMatrixR::InnerIterator it(Q_gamma, c); it; ++it)
    {
      left(it.row(), it.col()) += 0.5 * it.value();
    }
  }
  return {left, bem.V};
}

}  // namespace cvembem
