// SPDX-License-Identifier: Apache-2.0

#include "cvembem/cvem.hpp"

#include <cmath>
#include <string>
#include <Eigen/LU>
#include "cvembem/errors.hpp"

namespace cvembem
{

namespace
{

constexpr int element_order = 8;
constexpr int curved_edge_order = 8;
constexpr int gamma_mass_order = 9;

// Local index of node m (0..k) on edge i of an element with nv vertices.
int EdgeNodeLocal(int nv, int k, int i, int m)
{
  if (m == 0)
  {
    return i;
  }
  if (m == k)
  {
    return (i + 1) % nv;
  }
  return nv + i * (k - 1) + (m - 1);
}

// Quadrature on [0, 1] for the boundary integrals of an edge.
Rule1D EdgeRule(const EdgeMap &edge, int k)
{
  return edge.IsCurved() ? MapRule(GaussLegendre(curved_edge_order), 0.0, 1.0)
                         : MapRule(GaussLobatto(k + 1), 0.0, 1.0);
}

std::string ElementName(const ElementView &E)
{
  return (E.id >= 0) ? "element " + std::to_string(E.id) : "element";
}

}  // namespace

ScaledMonomials::ScaledMonomials(const Point &center, double h, int k)
  : center_(center), h_(h), k_(k)
{
  for (int d = 0; d <= k; d++)
  {
    for (int b = 0; b <= d; b++)
    {
      alpha_.push_back({d - b, b});
    }
  }
}

int ScaledMonomials::Index(int a, int b) const
{
  if (a < 0 || b < 0 || a + b > k_)
  {
    return -1;
  }
  const int d = a + b;
  return d * (d + 1) / 2 + b;
}

Eigen::VectorXd ScaledMonomials::Values(const Point &x) const
{
  const Point z = (x - center_) / h_;
  Eigen::VectorXd v(Size());
  for (int i = 0; i < Size(); i++)
  {
    v(i) = std::pow(z.x(), alpha_[i][0]) * std::pow(z.y(), alpha_[i][1]);
  }
  return v;
}

Eigen::MatrixXd ScaledMonomials::Gradients(const Point &x) const
{
  const Point z = (x - center_) / h_;
  Eigen::MatrixXd g(Size(), 2);
  for (int i = 0; i < Size(); i++)
  {
    const int a = alpha_[i][0], b = alpha_[i][1];
    g(i, 0) = (a == 0) ? 0.0 : a * std::pow(z.x(), a - 1) * std::pow(z.y(), b) / h_;
    g(i, 1) = (b == 0) ? 0.0 : b * std::pow(z.x(), a) * std::pow(z.y(), b - 1) / h_;
  }
  return g;
}

Eigen::MatrixXd ScaledMonomials::Values(const std::vector<Point> &x) const
{
  Eigen::MatrixXd v(x.size(), Size());
  for (std::size_t q = 0; q < x.size(); q++)
  {
    v.row(q) = Values(x[q]).transpose();
  }
  return v;
}

ElementView MakeElementView(const Mesh &mesh, int element)
{
  const Element &E = mesh.Elements()[element];
  return {mesh.GetShape(element), {E.area, E.centroid, E.diameter}, element};
}

ElementView MakeElementView(const CurvedPolygon &shape)
{
  return {shape, ComputeMetrics(shape), -1};
}

Eigen::VectorXd EdgeLagrange(int k, double s)
{
  const std::vector<double> nodes = EdgeNodes(k);
  Eigen::VectorXd l(k + 1);
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
    l(m) = v;
  }
  return l;
}

ProjectionMatrices ComputeProjectors(const ElementView &E, int k)
{
  const int nv = E.shape.NumVertices();
  const int n = DofMap::LocalCount(nv, k);
  const ScaledMonomials mono(E.metrics.centroid, E.metrics.diameter, k);
  const int nk = mono.Size();
  const int nm = ScaledMonomials::Dimension(k - 2);  // Moments, zero for k = 1.
  const double area = E.metrics.area;
  const double h = E.metrics.diameter;

  ProjectionMatrices P;
  P.k = k;
  P.G = Eigen::MatrixXd::Zero(nk, nk);
  P.H = Eigen::MatrixXd::Zero(nk, nk);
  P.B = Eigen::MatrixXd::Zero(nk, n);
  P.D = Eigen::MatrixXd::Zero(n, nk);

  const Rule2D rule = ElementRule(E.shape, element_order);
  for (int q = 0; q < rule.Size(); q++)
  {
    const Eigen::VectorXd v = mono.Values(rule.x[q]);
    const Eigen::MatrixXd g = mono.Gradients(rule.x[q]);
    P.H.noalias() += rule.w[q] * v * v.transpose();
    P.G.noalias() += rule.w[q] * g * g.transpose();
  }
  P.Gc = P.G;
  P.Gc.row(0).setZero();

  // Boundary terms edge by edge, with the trace of v_h the Lagrange interpolant of its
  // k + 1 edge dofs in the edge parameter.
  const std::vector<double> nodes = EdgeNodes(k);
  for (int i = 0; i < nv; i++)
  {
    const EdgeMap &edge = E.shape.edges[i];
    const Rule1D r = EdgeRule(edge, k);
    for (int q = 0; q < r.Size(); q++)
    {
      const Point x = edge.Eval(r.x[q]), d = edge.Derivative(r.x[q]);
      const Point nds(d.y(), -d.x());  // Outward normal times |c'|.
      const double ds = d.norm();
      const Eigen::VectorXd l = EdgeLagrange(k, r.x[q]);
      const Eigen::VectorXd v = mono.Values(x);
      const Eigen::VectorXd dn = mono.Gradients(x) * nds;
      P.Gc.row(0) += r.w[q] * ds * v.transpose();
      for (int m = 0; m <= k; m++)
      {
        const int j = EdgeNodeLocal(nv, k, i, m);
        P.B(0, j) += r.w[q] * ds * l(m);
        P.B.col(j).tail(nk - 1) += r.w[q] * l(m) * dn.tail(nk - 1);
      }
    }
    for (int m = 0; m < k; m++)
    {
      // Vertex i and the internal points of edge i.
      const int j = EdgeNodeLocal(nv, k, i, m);
      P.D.row(j) = mono.Values(edge.Eval(nodes[m])).transpose();
    }
  }

  // -int v_h Lap m_a, with Lap m_(a,b) = (a(a-1) m_(a-2,b) + b(b-1) m_(a,b-2)) / h^2 and
  // int v_h m_g = |E| * (moment dof g).
  for (int al = 1; al < nk; al++)
  {
    const int a = mono.Alpha(al)[0], b = mono.Alpha(al)[1];
    if (a >= 2)
    {
      P.B(al, nv * k + mono.Index(a - 2, b)) -= area * a * (a - 1) / (h * h);
    }
    if (b >= 2)
    {
      P.B(al, nv * k + mono.Index(a, b - 2)) -= area * b * (b - 1) / (h * h);
    }
  }
  for (int g = 0; g < nm; g++)
  {
    P.D.row(nv * k + g) = P.H.row(g) / area;
  }

  Eigen::PartialPivLU<Eigen::MatrixXd> luG(P.Gc);
  Eigen::PartialPivLU<Eigen::MatrixXd> luH(P.H);
  if (!(luG.rcond() > 1e-14) || !(luH.rcond() > 1e-14))
  {
    throw AssemblyError("singular projector Gram matrix on " + ElementName(E));
  }
  P.Pnabla = luG.solve(P.B);

  Eigen::MatrixXd C = P.H * P.Pnabla;
  for (int g = 0; g < nm; g++)
  {
    C.row(g).setZero();
    C(g, nv * k + g) = area;
  }
  P.P0 = luH.solve(C);
  return P;
}

LocalForms ComputeLocalForms(const ProjectionMatrices &P)
{
  const int n = static_cast<int>(P.D.rows());
  const Eigen::MatrixXd S = Eigen::MatrixXd::Identity(n, n) - P.D * P.Pnabla;
  LocalForms F;
  F.A = P.Pnabla.transpose() * P.G * P.Pnabla + S.transpose() * S;
  F.M = P.P0.transpose() * P.H * P.P0;
  // Symmetrize the rounding.
  F.A = 0.5 * (F.A + F.A.transpose()).eval();
  F.M = 0.5 * (F.M + F.M.transpose()).eval();
  return F;
}

Eigen::VectorXd InterpolateLocal(const ElementView &E, int k,
                                 const std::function<double(const Point &)> &f)
{
  const int nv = E.shape.NumVertices();
  Eigen::VectorXd v(DofMap::LocalCount(nv, k));
  const std::vector<double> nodes = EdgeNodes(k);
  for (int i = 0; i < nv; i++)
  {
    for (int m = 0; m < k; m++)
    {
      v(EdgeNodeLocal(nv, k, i, m)) = f(E.shape.edges[i].Eval(nodes[m]));
    }
  }
  const int nm = ScaledMonomials::Dimension(k - 2);
  if (nm > 0)
  {
    const ScaledMonomials mono(E.metrics.centroid, E.metrics.diameter, k - 2);
    const Rule2D rule = ElementRule(E.shape, element_order);
    Eigen::VectorXd mom = Eigen::VectorXd::Zero(nm);
    for (int q = 0; q < rule.Size(); q++)
    {
      mom += rule.w[q] * f(rule.x[q]) * mono.Values(rule.x[q]);
    }
    v.tail(nm) = mom / E.metrics.area;
  }
  return v;
}

GlobalBlocks AssembleFemBlocks(const Mesh &mesh, const DofMap &dofs)
{
  const int k = dofs.Degree();
  const int N = dofs.NumUnknowns(), NC = dofs.NumConstrained();
  using Triplet = Eigen::Triplet<double>;
  std::vector<Triplet> ta, tm, tla, tlm;
  for (int e = 0; e < mesh.NumElements(); e++)
  {
    const LocalForms F = ComputeLocalForms(ComputeProjectors(MakeElementView(mesh, e), k));
    const auto &ld = dofs.ElementDofs(e);
    const int n = static_cast<int>(ld.size());
    for (int a = 0; a < n; a++)
    {
      if (ld[a] < 0)
      {
        continue;
      }
      for (int b = 0; b < n; b++)
      {
        if (ld[b] >= 0)
        {
          ta.emplace_back(ld[a], ld[b], F.A(a, b));
          tm.emplace_back(ld[a], ld[b], F.M(a, b));
        }
        else
        {
          tla.emplace_back(ld[a], -1 - ld[b], F.A(a, b));
          tlm.emplace_back(ld[a], -1 - ld[b], F.M(a, b));
        }
      }
    }
  }
  GlobalBlocks G;
  G.A.resize(N, N);
  G.M.resize(N, N);
  G.lift_A.resize(N, NC);
  G.lift_M.resize(N, NC);
  G.A.setFromTriplets(ta.begin(), ta.end());
  G.M.setFromTriplets(tm.begin(), tm.end());
  G.lift_A.setFromTriplets(tla.begin(), tla.end());
  G.lift_M.setFromTriplets(tlm.begin(), tlm.end());
  G.Q_gamma = AssembleGammaMass(mesh, dofs);
  return G;
}

SparseMatrixR AssembleGammaMass(const Mesh &mesh, const DofMap &dofs)
{
  const int k = dofs.Degree(), nI = dofs.NumInterior();
  const Rule1D r = MapRule(GaussLegendre(gamma_mass_order), 0.0, 1.0);
  std::vector<Eigen::Triplet<double>> t;
  for (const auto &e : mesh.Edges())
  {
    if (e.tag != BoundaryTag::GAMMA)
    {
      continue;
    }
    const EdgeMap m = mesh.GetEdgeMap(e.id);
    const std::vector<int> ed = dofs.EdgeDofs(e.id);
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(k + 1, k + 1);
    for (int q = 0; q < r.Size(); q++)
    {
      const Eigen::VectorXd l = EdgeLagrange(k, r.x[q]);
      local.noalias() += r.w[q] * m.Derivative(r.x[q]).norm() * l * l.transpose();
    }
    for (int a = 0; a <= k; a++)
    {
      for (int b = 0; b <= k; b++)
      {
        t.emplace_back(ed[a] - nI, ed[b] - nI, local(a, b));
      }
    }
  }
  SparseMatrixR Q(dofs.NumGamma(), dofs.NumGamma());
  Q.setFromTriplets(t.begin(), t.end());
  return Q;
}

DofValues InterpolateGlobal(const Mesh &mesh, const DofMap &dofs,
                            const std::function<std::complex<double>(const Point &)> &f)
{
  DofValues v;
  v.free = Eigen::VectorXcd::Zero(dofs.NumUnknowns());
  v.constrained = Eigen::VectorXcd::Zero(dofs.NumConstrained());
  for (int i = 0; i < dofs.NumUnknowns(); i++)
  {
    const DofRecord &r = dofs.Unknown(i);
    if (r.kind != DofKind::MOMENT)
    {
      v.free(i) = f(r.x);
    }
  }
  for (int c = 0; c < dofs.NumConstrained(); c++)
  {
    v.constrained(c) = f(dofs.Constrained(c).x);
  }
  const int k = dofs.Degree();
  const int nm = ScaledMonomials::Dimension(k - 2);
  if (nm > 0)
  {
    for (int e = 0; e < mesh.NumElements(); e++)
    {
      const ElementView E = MakeElementView(mesh, e);
      const ScaledMonomials mono(E.metrics.centroid, E.metrics.diameter, k - 2);
      const Rule2D rule = ElementRule(E.shape, element_order);
      Eigen::VectorXcd mom = Eigen::VectorXcd::Zero(nm);
      for (int q = 0; q < rule.Size(); q++)
      {
        mom += (rule.w[q] * f(rule.x[q])) * mono.Values(rule.x[q]).cast<std::complex<double>>();
      }
      const auto &ld = dofs.ElementDofs(e);
      for (int g = 0; g < nm; g++)
      {
        v.free(ld[ld.size() - nm + g]) = mom(g) / E.metrics.area;
      }
    }
  }
  return v;
}

}  // namespace cvembem
