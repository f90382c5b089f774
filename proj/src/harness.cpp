// SPDX-License-Identifier: Apache-2.0

#include "cvembem/harness.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include "cvembem/bem.hpp"
#include "cvembem/errors.hpp"
#include "cvembem/quadrature.hpp"

namespace cvembem
{

namespace
{

std::string Trim(const std::string &s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
  {
    return "";
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double ToDouble(const std::string &key, const std::string &v)
{
  std::size_t pos = 0;
  double x = 0.0;
  try
  {
    x = std::stod(v, &pos);
  }
  catch (const std::exception &)
  {
    pos = 0;
  }
  if (pos == 0 || pos != v.size())
  {
    throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
  }
  return x;
}

int ToInt(const std::string &key, const std::string &v)
{
  std::size_t pos = 0;
  int x = 0;
  try
  {
    x = std::stoi(v, &pos);
  }
  catch (const std::exception &)
  {
    pos = 0;
  }
  if (pos == 0 || pos != v.size())
  {
    throw ConfigError("'" + key + "' expects an integer, got '" + v + "'");
  }
  return x;
}

void WriteNumber(std::ostream &out, double x)
{
  if (!std::isnan(x))
  {
    out << x;
  }
}

}  // namespace

Example ParseExample(const std::string &name)
{
  if (name == "annulus")
  {
    return Example::ANNULUS;
  }
  if (name == "square" || name == "square_ring")
  {
    return Example::SQUARE_RING;
  }
  if (name == "file" || name == "mesh")
  {
    return Example::MESH_FILE;
  }
  throw ConfigError("unknown example '" + name + "' (annulus, square, file)");
}

std::string ExampleName(Example e)
{
  switch (e)
  {
    case Example::ANNULUS:
      return "annulus";
    case Example::SQUARE_RING:
      return "square";
    case Example::MESH_FILE:
      return "file";
  }
  return "";
}

ExactSolution PointSourceSolution(double kappa)
{
  ExactSolution s;
  s.u = [kappa](const Point &x) { return Complex(0.0, 0.25) * Hankel1(0, kappa * x.norm()); };
  s.grad = [kappa](const Point &x)
  {
    // d/dr H0(kappa r) = -kappa H1(kappa r).
    const double r = x.norm();
    const Complex d = Complex(0.0, -0.25 * kappa) * Hankel1(1, kappa * r);
    return Eigen::Vector2cd(d * x.x() / r, d * x.y() / r);
  };
  return s;
}

void RunConfig::Validate() const
{
  if (!(kappa > 0.0) || !std::isfinite(kappa))
  {
    throw ConfigError("kappa must be positive");
  }
  if (k < 1 || k > 3)
  {
    throw ConfigError("degree must be 1, 2 or 3");
  }
  if (level_min < 0 || level_max < level_min || level_max > 10)
  {
    throw ConfigError("levels must satisfy 0 <= min <= max <= 10");
  }
  if (error_rule < 1 || error_rule > 64)
  {
    throw ConfigError("error_rule must be in 1..64");
  }
  if (example == Example::MESH_FILE && mesh_file.empty())
  {
    throw ConfigError("example 'file' needs mesh_file");
  }
  if (annulus_sectors < 3 || annulus_layers < 1 || square_per_side < 1 || square_layers < 1)
  {
    throw ConfigError("base mesh sizes must be positive (at least 3 annulus sectors)");
  }
}

void ApplyConfigValue(RunConfig &cfg, const std::string &key, const std::string &value)
{
  if (key == "example")
  {
    cfg.example = ParseExample(value);
  }
  else if (key == "mesh_file")
  {
    cfg.mesh_file = value;
  }
  else if (key == "kappa")
  {
    cfg.kappa = ToDouble(key, value);
  }
  else if (key == "k" || key == "degree")
  {
    cfg.k = ToInt(key, value);
  }
  else if (key == "levels")
  {
    const auto dots = value.find("..");
    if (dots == std::string::npos)
    {
      cfg.level_min = cfg.level_max = ToInt(key, value);
    }
    else
    {
      cfg.level_min = ToInt(key, Trim(value.substr(0, dots)));
      cfg.level_max = ToInt(key, Trim(value.substr(dots + 2)));
    }
  }
  else if (key == "level_min")
  {
    cfg.level_min = ToInt(key, value);
  }
  else if (key == "level_max")
  {
    cfg.level_max = ToInt(key, value);
  }
  else if (key == "output")
  {
    cfg.output = value;
  }
  else if (key == "error_rule")
  {
    cfg.error_rule = ToInt(key, value);
  }
  else if (key == "annulus_sectors")
  {
    cfg.annulus_sectors = ToInt(key, value);
  }
  else if (key == "annulus_layers")
  {
    cfg.annulus_layers = ToInt(key, value);
  }
  else if (key == "square_per_side")
  {
    cfg.square_per_side = ToInt(key, value);
  }
  else if (key == "square_layers")
  {
    cfg.square_layers = ToInt(key, value);
  }
  else
  {
    throw ConfigError("unknown configuration key '" + key + "'");
  }
}

RunConfig ParseConfig(std::istream &in)
{
  RunConfig cfg;
  std::string line;
  int n = 0;
  while (std::getline(in, line))
  {
    n++;
    const auto hash = line.find('#');
    if (hash != std::string::npos)
    {
      line.erase(hash);
    }
    line = Trim(line);
    if (line.empty())
    {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
    {
      throw ParseError("expected key = value", n);
    }
    try
    {
      ApplyConfigValue(cfg, Trim(line.substr(0, eq)), Trim(line.substr(eq + 1)));
    }
    catch (const ConfigError &e)
    {
      throw ParseError(e.what(), n);
    }
  }
  return cfg;
}

RunConfig ReadConfig(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw ConfigError("cannot open configuration file " + path);
  }
  return ParseConfig(in);
}

Mesh BuildLevelMesh(const RunConfig &cfg, int level)
{
  Mesh m = [&]
  {
    switch (cfg.example)
    {
      case Example::ANNULUS:
        return BuildAnnulusMesh(1.0, 2.0, cfg.annulus_sectors, cfg.annulus_layers);
      case Example::SQUARE_RING:
        return BuildSquareRingMesh(1.0, 2.0, cfg.square_per_side, cfg.square_layers);
      case Example::MESH_FILE:
        break;
    }
    return ReadMesh(cfg.mesh_file);
  }();
  for (int l = 0; l < level; l++)
  {
    m = Refine(m);
  }
  return m;
}

ErrorPair ErrorNorms(const Mesh &mesh, const DofMap &dofs, const Eigen::VectorXcd &u_free,
                     const Eigen::VectorXcd &u_constrained, const ExactSolution &exact,
                     int rule_order)
{
  if (u_free.size() != dofs.NumUnknowns() || u_constrained.size() != dofs.NumConstrained())
  {
    throw AssemblyError("solution vector does not match the dof map");
  }
  const int k = dofs.Degree();
  double num_l2 = 0.0, den_l2 = 0.0, num_h1 = 0.0, den_h1 = 0.0;
  for (int e = 0; e < mesh.NumElements(); e++)
  {
    const ElementView E = MakeElementView(mesh, e);
    const ProjectionMatrices P = ComputeProjectors(E, k);
    const auto &ld = dofs.ElementDofs(e);
    Eigen::VectorXcd v(ld.size());
    for (std::size_t a = 0; a < ld.size(); a++)
    {
      v(a) = ld[a] >= 0 ? u_free(ld[a]) : u_constrained(-1 - ld[a]);
    }
    const Eigen::VectorXcd cn = P.Pnabla.cast<Complex>() * v;
    const Eigen::VectorXcd c0 = P.P0.cast<Complex>() * v;
    const ScaledMonomials mono(E.metrics.centroid, E.metrics.diameter, k);
    const Rule2D r = ElementRule(E.shape, rule_order);
    for (std::size_t q = 0; q < r.x.size(); q++)
    {
      const Point &x = r.x[q];
      const Eigen::VectorXd m = mono.Values(x);
      const Eigen::MatrixXd g = mono.Gradients(x);
      const Complex u = exact.u(x);
      const Eigen::Vector2cd gu = exact.grad(x);
      const Complex p0 = (m.transpose().cast<Complex>() * c0)(0);
      const Eigen::Vector2cd gp = g.transpose().cast<Complex>() * cn;
      num_l2 += r.w[q] * std::norm(u - p0);
      den_l2 += r.w[q] * std::norm(u);
      num_h1 += r.w[q] * (gu - gp).squaredNorm();
      den_h1 += r.w[q] * gu.squaredNorm();
    }
  }
  if (!(den_l2 > 0.0) || !(den_h1 > 0.0))
  {
    throw ConfigError("exact solution vanishes; relative errors are undefined");
  }
  return {std::sqrt(num_l2 / den_l2), std::sqrt(num_h1 / den_h1)};
}

std::vector<double> Eoc(const std::vector<double> &errors)
{
  std::vector<double> out;
  for (double e : errors)
  {
    if (!(e > 0.0))
    {
      throw DomainError("EOC needs positive errors");
    }
  }
  for (std::size_t i = 0; i + 1 < errors.size(); i++)
  {
    out.push_back(std::log2(errors[i] / errors[i + 1]));
  }
  return out;
}

void WriteCsvHeader(std::ostream &out)
{
  out << "level,h,dofs,err_l2,eoc_l2,err_h1,eoc_h1\n";
}

void WriteCsvRow(std::ostream &out, const ErrorReport &r)
{
  const auto flags = out.flags();
  const auto prec = out.precision();
  out << std::setprecision(17) << r.level << ',' << r.h << ',' << r.dofs << ',' << r.err_l2 << ',';
  WriteNumber(out, r.eoc_l2);
  out << ',' << r.err_h1 << ',';
  WriteNumber(out, r.eoc_h1);
  out << '\n';
  out.flags(flags);
  out.precision(prec);
}

std::vector<ErrorReport> RunConvergence(const RunConfig &cfg, std::ostream *csv)
{
  cfg.Validate();
  std::ofstream file;
  if (!cfg.output.empty())
  {
    file.open(cfg.output);
    if (!file)
    {
      throw ConfigError("cannot write " + cfg.output);
    }
    WriteCsvHeader(file);
    file.flush();
  }
  if (csv)
  {
    WriteCsvHeader(*csv);
  }
  const ExactSolution exact = PointSourceSolution(cfg.kappa);
  ProblemSpec spec;
  spec.kappa = cfg.kappa;
  spec.k = cfg.k;
  spec.g = exact.u;
  std::vector<ErrorReport> reports;
  for (int level = cfg.level_min; level <= cfg.level_max; level++)
  {
    const Mesh mesh = BuildLevelMesh(cfg, level);
    const DofMap dofs(mesh, cfg.k);
    spec.level = level;
    const SolveResult result = SolveProblem(mesh, dofs, spec);
    const ErrorPair err =
        ErrorNorms(mesh, dofs, result.u, result.u_constrained, exact, cfg.error_rule);
    ErrorReport r{level,
                  mesh.H(),
                  dofs.NumUnknowns() + dofs.NumConstrained(),
                  err.err_l2,
                  err.err_h1,
                  std::numeric_limits<double>::quiet_NaN(),
                  std::numeric_limits<double>::quiet_NaN()};
    if (!reports.empty())
    {
      r.eoc_l2 = Eoc({reports.back().err_l2, r.err_l2})[0];
      r.eoc_h1 = Eoc({reports.back().err_h1, r.err_h1})[0];
    }
    reports.push_back(r);
    for (std::ostream *out : {csv, static_cast<std::ostream *>(file.is_open() ? &file : nullptr)})
    {
      if (out)
      {
        WriteCsvRow(*out, r);
        out->flush();
      }
    }
  }
  return reports;
}

}  // namespace cvembem
