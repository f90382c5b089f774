// SPDX-License-Identifier: Apache-2.0

#ifndef CVEMBEM_HARNESS_HPP
#define CVEMBEM_HARNESS_HPP

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>
#include <Eigen/Core>
#include "cvembem/mesh.hpp"
#include "cvembem/solver.hpp"

namespace cvembem
{

enum class Example
{
  ANNULUS,      // Unit disk obstacle, Gamma the circle of radius 2.
  SQUARE_RING,  // Square obstacle [-1, 1]^2, Gamma the boundary of [-2, 2]^2.
  MESH_FILE
};

Example ParseExample(const std::string &name);
std::string ExampleName(Example e);

// Field of a point source at the origin, (i/4) H0(kappa |x|), and its gradient.
struct ExactSolution
{
  ComplexField u;
  std::function<Eigen::Vector2cd(const Point &)> grad;
};
ExactSolution PointSourceSolution(double kappa);

struct RunConfig
{
  Example example = Example::ANNULUS;
  std::string mesh_file;  // For MESH_FILE: level-0 mesh.
  double kappa = 1.0;
  int k = 1;
  int level_min = 0, level_max = 3;
  std::string output;  // CSV path; empty for none.
  int error_rule = 8;  // Element rule order of the error integrals.
  int annulus_sectors = 16, annulus_layers = 3;
  int square_per_side = 8, square_layers = 2;

  // Throws ConfigError for out-of-range values.
  void Validate() const;
};

// key = value lines, '#' starts a comment. Keys are the RunConfig field names; levels may be
// given as "levels = A..B".
RunConfig ParseConfig(std::istream &in);
RunConfig ReadConfig(const std::string &path);
void ApplyConfigValue(RunConfig &cfg, const std::string &key, const std::string &value);

// Level-0 mesh of the configured example refined `level` times.
Mesh BuildLevelMesh(const RunConfig &cfg, int level);

//
// Relative errors of a discrete solution through its projections:
//   err_h1 = sqrt(sum_E |u - Pi_nabla u_h|^2_{H1(E)} / sum_E |u|^2_{H1(E)}),
//   err_l2 = sqrt(sum_E ||u - Pi_0 u_h||^2_{L2(E)} / sum_E ||u||^2_{L2(E)}).
//
struct ErrorPair
{
  double err_l2, err_h1;
};
ErrorPair ErrorNorms(const Mesh &mesh, const DofMap &dofs, const Eigen::VectorXcd &u_free,
                     const Eigen::VectorXcd &u_constrained, const ExactSolution &exact,
                     int rule_order = 8);

// log2(e_L / e_{L+1}) for consecutive entries.
std::vector<double> Eoc(const std::vector<double> &errors);

struct ErrorReport
{
  int level;
  double h;
  int dofs;  // Dimension of the CVEM space, Gamma0 nodes included.
  double err_l2, err_h1;
  double eoc_l2, eoc_h1;  // NaN on the first row.
};

void WriteCsvHeader(std::ostream &out);
void WriteCsvRow(std::ostream &out, const ErrorReport &r);

// Solves the point-source problem on each level. Rows are written to `csv` (if given) and to
// cfg.output (if set) as soon as each level finishes.
std::vector<ErrorReport> RunConvergence(const RunConfig &cfg, std::ostream *csv = nullptr);

}  // namespace cvembem

#endif  // CVEMBEM_HARNESS_HPP
