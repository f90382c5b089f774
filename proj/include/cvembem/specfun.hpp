// SPDX-License-Identifier: Apache-2.0

#ifndef CVEMBEM_SPECFUN_HPP
#define CVEMBEM_SPECFUN_HPP

#include <complex>
#include "cvembem/geometry.hpp"

namespace cvembem
{

using Complex = std::complex<double>;

inline constexpr double euler_gamma = 0.5772156649015329;

// Bessel functions of the first and second kind, orders 0 and 1, real x > 0 (J also accepts
// x = 0).
double BesselJ(int m, double x);
double BesselY(int m, double x);
Complex Hankel1(int m, double x);

// J_m and Y_m for m = 0, 1 in one pass (shares the recurrence).
struct BesselPair
{
  double j0, j1, y0, y1;
};
BesselPair BesselJY01(double x);

// Fundamental solutions. The normal derivative is taken in the second argument, with the
// unit normal ny.
Complex GreenHelmholtz(const Point &x, const Point &y, double kappa);
Complex GreenHelmholtzDny(const Point &x, const Point &y, const Point &ny, double kappa);
double GreenLaplace(const Point &x, const Point &y);
double GreenLaplaceDny(const Point &x, const Point &y, const Point &ny);

// Versions taking the difference d = x - y directly, for callers that compute it stably.
Complex GreenHelmholtzDiff(const Point &d, double kappa);
Complex GreenHelmholtzDnyDiff(const Point &d, const Point &ny, double kappa);

}  // namespace cvembem

#endif  // CVEMBEM_SPECFUN_HPP
