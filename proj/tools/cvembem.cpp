// SPDX-License-Identifier: Apache-2.0

// Command-line driver: mesh generation, single solves and convergence studies.

#include <cstdio>
#include <iomanip>
#include <iostream>
#include <map>
#include <CLI11.hpp>
#include "cvembem/bem.hpp"
#include "cvembem/errors.hpp"
#include "cvembem/harness.hpp"

using namespace cvembem;

namespace
{

// Options shared by the subcommands. Values given on the command line override the
// configuration file; options left unset keep the file or default value.
struct CommonOptions
{
  std::string config;
  std::map<std::string, std::string> values;

  void Register(CLI::App *app, bool with_physics)
  {
    app->add_option("--config", config, "key = value configuration file")->check(CLI::ExistingFile);
    Add(app, "--example", "example", "annulus, square or file");
    Add(app, "--mesh-file", "mesh_file", "base mesh for --example file");
    if (with_physics)
    {
      Add(app, "--kappa", "kappa", "wavenumber");
      Add(app, "--degree", "degree", "polynomial degree k (1 to 3)");
      Add(app, "--error-rule", "error_rule", "Gauss order of the error quadrature");
    }
  }

  void Add(CLI::App *app, const std::string &flag, const std::string &key, const std::string &help)
  {
    app->add_option_function<std::string>(flag, [this, key](const std::string &v)
                                          { values[key] = v; }, help);
  }

  RunConfig Resolve() const
  {
    RunConfig cfg = config.empty() ? RunConfig() : ReadConfig(config);
    for (const auto &[key, value] : values)
    {
      ApplyConfigValue(cfg, key, value);
    }
    return cfg;
  }
};

Point ParsePoint(const std::string &s)
{
  const auto comma = s.find(',');
  if (comma == std::string::npos)
  {
    throw ConfigError("evaluation point must be x,y: '" + s + "'");
  }
  try
  {
    return Point(std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1)));
  }
  catch (const std::exception &)
  {
    throw ConfigError("evaluation point must be x,y: '" + s + "'");
  }
}

int RunMesh(const RunConfig &cfg, int level, const std::string &out)
{
  const Mesh m = BuildLevelMesh(cfg, level);
  if (out.empty())
  {
    WriteMesh(m, std::cout);
  }
  else
  {
    WriteMesh(m, out);
    std::cerr << "wrote " << out << ": " << m.NumElements() << " elements, h = " << m.H()
              << "\n";
  }
  return 0;
}

int RunSolve(RunConfig cfg, int level, const std::vector<std::string> &eval)
{
  cfg.level_min = cfg.level_max = level;
  cfg.Validate();
  const Mesh mesh = BuildLevelMesh(cfg, level);
  const DofMap dofs(mesh, cfg.k);
  const ExactSolution exact = PointSourceSolution(cfg.kappa);
  ProblemSpec spec;
  spec.kappa = cfg.kappa;
  spec.k = cfg.k;
  spec.level = level;
  spec.g = exact.u;
  const SolveResult r = SolveProblem(mesh, dofs, spec);
  const ErrorPair e = ErrorNorms(mesh, dofs, r.u, r.u_constrained, exact, cfg.error_rule);
  std::cout << std::setprecision(6) << "example " << ExampleName(cfg.example) << ", kappa "
            << cfg.kappa << ", k " << cfg.k << ", level " << level << "\n"
            << "h " << mesh.H() << ", dofs " << dofs.NumUnknowns() + dofs.NumConstrained()
            << ", system size " << r.system_size << "\n"
            << "residual " << r.residual_norm << ", pivot ratio " << r.rcond << "\n"
            << "relative L2 error " << e.err_l2 << ", relative H1 error " << e.err_h1 << "\n";
  if (!eval.empty())
  {
    std::vector<Point> points;
    for (const auto &s : eval)
    {
      points.push_back(ParsePoint(s));
    }
    const BoundaryMesh bm(mesh, dofs);
    const ExteriorValues ext = EvaluateExterior(r, bm, cfg.kappa, points);
    for (const auto &w : ext.warnings)
    {
      std::cerr << "warning: " << w << "\n";
    }
    std::cout << std::setprecision(12);
    for (std::size_t i = 0; i < points.size(); i++)
    {
      const Complex u = ext.values[i];
      std::cout << "u(" << points[i].x() << ", " << points[i].y() << ") = " << u.real()
                << (u.imag() < 0 ? " - " : " + ") << std::abs(u.imag()) << "i, |error| "
                << std::setprecision(3) << std::abs(u - exact.u(points[i]))
                << std::setprecision(12) << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Curved virtual element and boundary element solver for exterior Helmholtz "
               "problems"};
  app.require_subcommand(1);

  CommonOptions mesh_opts, solve_opts, conv_opts;
  int mesh_level = 0, solve_level = 0;
  std::string mesh_out, levels, conv_out;
  std::vector<std::string> eval;

  CLI::App *mesh = app.add_subcommand("mesh", "write a refined example mesh");
  mesh_opts.Register(mesh, false);
  mesh->add_option("--level", mesh_level, "refinement level")->check(CLI::Range(0, 10));
  mesh->add_option("--out", mesh_out, "output mesh file (default: stdout)");

  CLI::App *solve = app.add_subcommand("solve", "solve one level and report errors");
  solve_opts.Register(solve, true);
  solve->add_option("--level", solve_level, "refinement level")->check(CLI::Range(0, 10));
  solve->add_option("--eval", eval, "exterior evaluation points x,y");

  CLI::App *conv = app.add_subcommand("converge", "convergence study with CSV output");
  conv_opts.Register(conv, true);
  conv->add_option("--levels", levels, "level range A..B");
  conv->add_option("--out", conv_out, "CSV output file");

  CLI11_PARSE(app, argc, argv);

  try
  {
    if (mesh->parsed())
    {
      const RunConfig cfg = mesh_opts.Resolve();
      return RunMesh(cfg, mesh_level, mesh_out);
    }
    if (solve->parsed())
    {
      return RunSolve(solve_opts.Resolve(), solve_level, eval);
    }
    RunConfig cfg = conv_opts.Resolve();
    if (!levels.empty())
    {
      ApplyConfigValue(cfg, "levels", levels);
    }
    if (!conv_out.empty())
    {
      cfg.output = conv_out;
    }
    RunConvergence(cfg, &std::cout);
  }
  catch (const std::exception &e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
