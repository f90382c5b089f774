// SPDX-License-Identifier: Apache-2.0

#include "cvembem/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <Eigen/LU>
#include <umfpack.h>
#include "cvembem/errors.hpp"
#include "cvembem/quadrature.hpp"

namespace cvembem
{

namespace
{

constexpr int load_rule_order = 8;
constexpr int exterior_rule_points = 9;
constexpr double near_gamma_fraction = 0.05;
constexpr double residual_tolerance = 1e-8;

// Owns the UMFPACK symbolic and numeric objects of one complex factorization.
class UmfpackLU
{
public:
  // A must outlive the factorization. Uncompressed input is copied.
  explicit UmfpackLU(const SparseMatrixC &A) : A_(&A)
  {
    if (!A.isCompressed())
    {
      copy_ = A;
      copy_.makeCompressed();
      A_ = &copy_;
    }
    umfpack_zi_defaults(control_);
    // Singleton rows and columns are pivoted without a numerical test, which picked near-zero
    // pivots on systems with a zero diagonal block. METIS keeps the fill of the finest meshes
    // within a few GB.
    control_[UMFPACK_SINGLETONS] = 0;
    control_[UMFPACK_ORDERING] = UMFPACK_ORDERING_METIS;
    const int n = static_cast<int>(A_->rows());
    int status = umfpack_zi_symbolic(n, n, A_->outerIndexPtr(), A_->innerIndexPtr(), Real(), nullptr,
                                     &symbolic_, control_, info_);
    Check(status, "symbolic analysis");
    status = umfpack_zi_numeric(A_->outerIndexPtr(), A_->innerIndexPtr(), Real(), nullptr, symbolic_,
                                &numeric_, control_, info_);
    rcond_ = info_[UMFPACK_RCOND];
    if (status != UMFPACK_OK && status != UMFPACK_WARNING_singular_matrix)
    {
      Check(status, "numeric factorization");
    }
    if (status == UMFPACK_WARNING_singular_matrix || !(rcond_ > 0.0))
    {
      std::ostringstream msg;
      msg << "coupled system is numerically singular (kappa^2 near an interior eigenvalue or a "
             "broken mesh); UMFPACK status "
          << status << ", pivot ratio " << rcond_;
      throw SolverError(msg.str(), rcond_);
    }
  }

  ~UmfpackLU()
  {
    if (numeric_)
    {
      umfpack_zi_free_numeric(&numeric_);
    }
    if (symbolic_)
    {
      umfpack_zi_free_symbolic(&symbolic_);
    }
  }

  UmfpackLU(const UmfpackLU &) = delete;
  UmfpackLU &operator=(const UmfpackLU &) = delete;

  Eigen::VectorXcd Solve(const Eigen::VectorXcd &b)
  {
    Eigen::VectorXcd x(b.size());
    const int status = umfpack_zi_solve(UMFPACK_A, A_->outerIndexPtr(), A_->innerIndexPtr(), Real(),
                                        nullptr, reinterpret_cast<double *>(x.data()), nullptr,
                                        reinterpret_cast<const double *>(b.data()), nullptr,
                                        numeric_, control_, info_);
    Check(status, "solve");
    return x;
  }

  double Rcond() const { return rcond_; }

private:
  const double *Real() const { return reinterpret_cast<const double *>(A_->valuePtr()); }

  void Check(int status, const char *stage) const
  {
    if (status != UMFPACK_OK)
    {
      std::ostringstream msg;
      msg << "UMFPACK " << stage << " failed with status " << status;
      if (status == UMFPACK_ERROR_out_of_memory)
      {
        msg << " (out of memory)";
      }
      throw SolverError(msg.str(), info_[UMFPACK_RCOND]);
    }
  }

  const SparseMatrixC *A_;
  SparseMatrixC copy_;
  double control_[UMFPACK_CONTROL];
  double info_[UMFPACK_INFO] = {};
  void *symbolic_ = nullptr;
  void *numeric_ = nullptr;
  double rcond_ = 0.0;
};

// Winding number of the sampled Gamma loop about x.
double Winding(const BoundaryMesh &bm, const Point &x)
{
  double angle = 0.0;
  for (const auto &p : bm.Panels())
  {
    Point a = p.map.Start() - x;
    for (int i = 1; i <= 16; i++)
    {
      const Point b = p.map.Eval(i / 16.0) - x;
      angle += std::atan2(a.x() * b.y() - a.y() * b.x(), a.dot(b));
      a = b;
    }
  }
  return angle / (2.0 * std::numbers::pi);
}

}  // namespace

DofValues DiscreteLoad(const Mesh &mesh, const DofMap &dofs, const ComplexField &f)
{
  DofValues load{Eigen::VectorXcd::Zero(dofs.NumUnknowns()),
                 Eigen::VectorXcd::Zero(dofs.NumConstrained())};
  if (!f)
  {
    return load;
  }
  const int k = dofs.Degree();
  for (int e = 0; e < mesh.NumElements(); e++)
  {
    const ElementView E = MakeElementView(mesh, e);
    const ProjectionMatrices P = ComputeProjectors(E, k);
    // Pi0_1 from the first three moments: C = H P0 holds int Phi_j m_a for all |a| <= k.
    const Eigen::MatrixXd C = P.H * P.P0;
    const Eigen::MatrixXd P01 = P.H.topLeftCorner(3, 3).partialPivLu().solve(C.topRows(3));
    const ScaledMonomials mono(E.metrics.centroid, E.metrics.diameter, 1);
    const Rule2D r = ElementRule(E.shape, load_rule_order);
    Eigen::Vector3cd fm = Eigen::Vector3cd::Zero();
    for (std::size_t q = 0; q < r.x.size(); q++)
    {
      fm += r.w[q] * f(r.x[q]) * mono.Values(r.x[q]).cast<Complex>();
    }
    const Eigen::VectorXcd local = P01.transpose().cast<Complex>() * fm;
    const auto &ld = dofs.ElementDofs(e);
    for (std::size_t a = 0; a < ld.size(); a++)
    {
      if (ld[a] >= 0)
      {
        load.free(ld[a]) += local(a);
      }
      else
      {
        load.constrained(-1 - ld[a]) += local(a);
      }
    }
  }
  return load;
}

Eigen::VectorXcd DirichletLift(const DofMap &dofs, const ComplexField &g)
{
  Eigen::VectorXcd lift = Eigen::VectorXcd::Zero(dofs.NumConstrained());
  if (!g)
  {
    return lift;
  }
  for (int c = 0; c < dofs.NumConstrained(); c++)
  {
    lift(c) = g(dofs.Constrained(c).x);
  }
  return lift;
}

LinearSystem BuildSystem(const GlobalBlocks &blocks, const BemMatrices &bem, int num_interior,
                         const Eigen::VectorXcd &load, const Eigen::VectorXcd &lift)
{
  const int N = static_cast<int>(blocks.A.rows());
  const int nG = static_cast<int>(bem.V.rows());
  if (blocks.M.rows() != N || num_interior + nG != N || blocks.Q_gamma.rows() != nG ||
      load.size() != N || lift.size() != blocks.lift_A.cols() || blocks.lift_M.cols() != lift.size())
  {
    throw AssemblyError("coupled system blocks have inconsistent dimensions");
  }
  const double k2 = bem.kappa * bem.kappa;
  // Written column by column in compressed form: the dense boundary blocks dominate the
  // storage on fine meshes, and triplets would double it.
  const SparseMatrixR F = blocks.A - k2 * blocks.M;
  const Eigen::MatrixXd Qd = Eigen::MatrixXd(blocks.Q_gamma);
  const std::size_t nnz = F.nonZeros() + blocks.Q_gamma.nonZeros() + 2 * std::size_t(nG) * nG;
  if (nnz > static_cast<std::size_t>(std::numeric_limits<int>::max()))
  {
    throw AssemblyError("coupled system has too many nonzeros for 32-bit indices");
  }
  LinearSystem s;
  s.matrix.resize(N + nG, N + nG);
  s.matrix.resizeNonZeros(static_cast<Eigen::Index>(nnz));
  int *outer = s.matrix.outerIndexPtr();
  int *inner = s.matrix.innerIndexPtr();
  Complex *val = s.matrix.valuePtr();
  int pos = 0;
  for (int c = 0; c < N; c++)
  {
    outer[c] = pos;
    for (SparseMatrixR::InnerIterator it(F, c); it; ++it)
    {
      inner[pos] = static_cast<int>(it.row());
      val[pos++] = it.value();
    }
    if (c >= num_interior)
    {
      const int g = c - num_interior;
      for (int r = 0; r < nG; r++)
      {
        inner[pos] = N + r;
        val[pos++] = 0.5 * Qd(r, g) - bem.K(r, g);
      }
    }
  }
  for (int c = 0; c < nG; c++)
  {
    outer[N + c] = pos;
    for (SparseMatrixR::InnerIterator it(blocks.Q_gamma, c); it; ++it)
    {
      inner[pos] = num_interior + static_cast<int>(it.row());
      val[pos++] = -it.value();
    }
    for (int r = 0; r < nG; r++)
    {
      inner[pos] = N + r;
      val[pos++] = bem.V(r, c);
    }
  }
  outer[N + nG] = pos;
  s.matrix.resizeNonZeros(pos);
  s.rhs = Eigen::VectorXcd::Zero(N + nG);
  s.rhs.head(N) = load - blocks.lift_A.cast<Complex>() * lift + k2 * (blocks.lift_M.cast<Complex>() * lift);
  s.num_unknowns = N;
  s.num_interior = num_interior;
  s.num_gamma = nG;
  return s;
}

SolveResult Solve(const LinearSystem &system)
{
  const int n = static_cast<int>(system.matrix.rows());
  if (system.matrix.cols() != n || system.rhs.size() != n ||
      system.num_unknowns + system.num_gamma != n)
  {
    throw AssemblyError("linear system dimensions are inconsistent");
  }
  UmfpackLU lu(system.matrix);
  const Eigen::VectorXcd x = lu.Solve(system.rhs);
  SolveResult r;
  r.residual_norm = (system.matrix * x - system.rhs).norm();
  r.rcond = lu.Rcond();
  r.system_size = n;
  const double bound = residual_tolerance * (system.rhs.norm() + system.matrix.norm() * x.norm());
  if (!(r.residual_norm <= bound))
  {
    std::ostringstream msg;
    msg << "residual " << r.residual_norm << " exceeds " << bound;
    throw SolverError(msg.str(), r.rcond);
  }
  r.u = x.head(system.num_unknowns);
  r.lambda = x.tail(system.num_gamma);
  return r;
}

SolveResult SolveProblem(const Mesh &mesh, const DofMap &dofs, const ProblemSpec &spec)
{
  if (!(spec.kappa > 0.0) || !std::isfinite(spec.kappa))
  {
    throw ConfigError("kappa must be positive");
  }
  if (spec.k != dofs.Degree())
  {
    throw ConfigError("problem degree does not match the dof map");
  }
  const Eigen::VectorXcd lift = DirichletLift(dofs, spec.g);
  // The blocks go out of scope before the factorization allocates.
  const LinearSystem system = [&]
  {
    const GlobalBlocks blocks = AssembleFemBlocks(mesh, dofs);
    const BemMatrices bem = AssembleBem(BoundaryMesh(mesh, dofs), spec.kappa);
    return BuildSystem(blocks, bem, dofs.NumInterior(), DiscreteLoad(mesh, dofs, spec.f).free,
                       lift);
  }();
  SolveResult r = Solve(system);
  r.u_constrained = lift;
  return r;
}

ExteriorValues EvaluateExterior(const SolveResult &result, const BoundaryMesh &bm, double kappa,
                                const std::vector<Point> &points)
{
  const int nG = bm.NumDofs(), k = bm.Degree();
  if (result.lambda.size() != nG || result.u.size() < nG)
  {
    throw AssemblyError("solution does not match the boundary mesh");
  }
  const Eigen::VectorXcd uG = result.u.tail(nG);
  const Rule1D rule = MapRule(GaussLegendre(exterior_rule_points), 0.0, 1.0);
  double h = 0.0;
  for (const auto &p : bm.Panels())
  {
    h = std::max(h, (p.map.End() - p.map.Start()).norm());
  }
  ExteriorValues out;
  for (const Point &x : points)
  {
    if (std::abs(Winding(bm, x)) > 0.5)
    {
      throw DomainError("exterior evaluation point lies inside Gamma");
    }
    Complex value = 0.0;
    double dist = std::numeric_limits<double>::infinity();
    for (const auto &p : bm.Panels())
    {
      for (int i = 0; i <= 16; i++)
      {
        dist = std::min(dist, (p.map.Eval(i / 16.0) - x).norm());
      }
      for (int q = 0; q < rule.Size(); q++)
      {
        const Eigen::VectorXd l = EdgeLagrange(k, rule.x[q]);
        Complex uq = 0.0, lq = 0.0;
        for (int a = 0; a <= k; a++)
        {
          uq += l(a) * uG(p.dofs[a]);
          lq += l(a) * result.lambda(p.dofs[a]);
        }
        const Point y = p.map.Eval(rule.x[q]), yd = p.map.Derivative(rule.x[q]);
        const double jac = yd.norm();
        const Point ny(yd.y() / jac, -yd.x() / jac);
        value += rule.w[q] * jac *
                 (GreenHelmholtzDny(x, y, ny, kappa) * uq - GreenHelmholtz(x, y, kappa) * lq);
      }
    }
    if (dist < near_gamma_fraction * h)
    {
      std::ostringstream msg;
      msg << "point (" << x.x() << ", " << x.y() << ") is " << dist
          << " from Gamma; the 9-point panel rule is inaccurate there";
      out.warnings.push_back(msg.str());
    }
    out.values.push_back(value);
  }
  return out;
}

}  // namespace cvembem
