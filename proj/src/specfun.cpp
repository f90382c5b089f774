// SPDX-License-Identifier: Apache-2.0

#include "cvembem/specfun.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include "cvembem/errors.hpp"

namespace cvembem
{

namespace
{

constexpr double pi = std::numbers::pi;

// Below this argument: Miller's backward recurrence for J_n normalized with
// J_0 + 2 sum J_2k = 1, and Neumann series for Y_0, Y_1. Above: Hankel asymptotic expansion,
// whose smallest term is about exp(-2x).
constexpr double asymptotic_threshold = 25.0;

// Leading power-series terms; the recurrence would overflow for tiny arguments.
constexpr double series_threshold = 1.0e-5;

BesselPair SmallArgument(double x)
{
  const double lg = std::log(0.5 * x) + euler_gamma, x2 = x * x;
  BesselPair b;
  b.j0 = 1.0 - 0.25 * x2;
  b.j1 = 0.5 * x * (1.0 - 0.125 * x2);
  b.y0 = 2.0 / pi * (lg * b.j0 + 0.25 * x2);
  b.y1 = -2.0 / (pi * x) + 2.0 / pi * lg * b.j1 - 0.5 * x / pi;
  return b;
}

BesselPair Recurrence(double x)
{
  if (x < series_threshold)
  {
    return SmallArgument(x);
  }
  int N = static_cast<int>(x + 30.0 + 3.0 * std::sqrt(x));
  N += N % 2;
  std::array<double, 80> j;
  j.fill(0.0);
  j[N] = 1.0e-300;
  for (int n = N; n > 0; n--)
  {
    j[n - 1] = 2.0 * n / x * j[n] - j[n + 1];
    if (std::abs(j[n - 1]) > 1.0e250)
    {
      for (int m = n - 1; m <= N + 1; m++)
      {
        j[m] *= 1.0e-250;
      }
    }
  }
  double norm = j[0];
  for (int k = 2; k <= N; k += 2)
  {
    norm += 2.0 * j[k];
  }
  for (int n = 0; n <= N + 1; n++)
  {
    j[n] /= norm;
  }

  double s0 = 0.0, s1 = 0.0;
  for (int k = 1; 2 * k + 1 <= N + 1; k++)
  {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    s0 += sign * j[2 * k] / k;
    s1 += sign * (j[2 * k - 1] - j[2 * k + 1]) / k;
  }
  const double lg = std::log(0.5 * x) + euler_gamma;
  BesselPair b;
  b.j0 = j[0];
  b.j1 = j[1];
  b.y0 = 2.0 / pi * (lg * j[0] - 2.0 * s0);
  b.y1 = 2.0 / pi * lg * j[1] - 2.0 * j[0] / (pi * x) + 2.0 / pi * s1;
  return b;
}

// P and Q of the Hankel expansion for order nu, truncated at the smallest term.
void AsymptoticPQ(int nu, double x, double &P, double &Q)
{
  const double mu = 4.0 * nu * nu;
  P = 1.0;
  Q = 0.0;
  double a = 1.0, last = 1.0;
  for (int k = 1; k < 200; k++)
  {
    const double t = (mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (k * 8.0 * x);
    const double next = a * t;
    if (std::abs(next) > last || next == 0.0)
    {
      break;
    }
    a = next;
    last = std::abs(a);
    // a_k / x^k enters P with sign (-1)^(k/2) for even k, Q with (-1)^((k-1)/2) for odd k.
    const int r = k % 4;
    if (r == 0)
    {
      P += a;
    }
    else if (r == 1)
    {
      Q += a;
    }
    else if (r == 2)
    {
      P -= a;
    }
    else
    {
      Q -= a;
    }
    if (last < 1.0e-18)
    {
      break;
    }
  }
}

BesselPair Asymptotic(double x)
{
  const double c = std::cos(x), s = std::sin(x), amp = std::sqrt(2.0 / (pi * x));
  const double r2 = std::numbers::sqrt2 / 2.0;
  BesselPair b;
  double P, Q;
  AsymptoticPQ(0, x, P, Q);
  {
    const double cc = r2 * (c + s), ss = r2 * (s - c);  // chi = x - pi/4
    b.j0 = amp * (P * cc - Q * ss);
    b.y0 = amp * (P * ss + Q * cc);
  }
  AsymptoticPQ(1, x, P, Q);
  {
    const double cc = r2 * (s - c), ss = -r2 * (s + c);  // chi = x - 3pi/4
    b.j1 = amp * (P * cc - Q * ss);
    b.y1 = amp * (P * ss + Q * cc);
  }
  return b;
}

void CheckOrder(int m)
{
  if (m != 0 && m != 1)
  {
    throw DomainError("Bessel order " + std::to_string(m) + " not supported");
  }
}

void CheckPositive(double x)
{
  if (!(x > 0.0) || !std::isfinite(x))
  {
    throw DomainError("Bessel argument must be positive and finite");
  }
}

}  // namespace

BesselPair BesselJY01(double x)
{
  CheckPositive(x);
  return (x < asymptotic_threshold) ? Recurrence(x) : Asymptotic(x);
}

double BesselJ(int m, double x)
{
  CheckOrder(m);
  if (x == 0.0)
  {
    return (m == 0) ? 1.0 : 0.0;
  }
  if (x < 0.0)
  {
    // J_0 is even, J_1 is odd.
    const double v = BesselJ(m, -x);
    return (m == 0) ? v : -v;
  }
  const BesselPair b = BesselJY01(x);
  return (m == 0) ? b.j0 : b.j1;
}

double BesselY(int m, double x)
{
  CheckOrder(m);
  const BesselPair b = BesselJY01(x);
  return (m == 0) ? b.y0 : b.y1;
}

Complex Hankel1(int m, double x)
{
  CheckOrder(m);
  const BesselPair b = BesselJY01(x);
  return (m == 0) ? Complex(b.j0, b.y0) : Complex(b.j1, b.y1);
}

Complex GreenHelmholtzDiff(const Point &d, double kappa)
{
  const double r = d.norm();
  if (r == 0.0)
  {
    throw DomainError("fundamental solution evaluated at coincident points");
  }
  const BesselPair b = BesselJY01(kappa * r);
  return Complex(0.0, 0.25) * Complex(b.j0, b.y0);
}

Complex GreenHelmholtzDnyDiff(const Point &d, const Point &ny, double kappa)
{
  const double r = d.norm();
  if (r == 0.0)
  {
    throw DomainError("fundamental solution evaluated at coincident points");
  }
  const BesselPair b = BesselJY01(kappa * r);
  return Complex(0.0, 0.25 * kappa * d.dot(ny) / r) * Complex(b.j1, b.y1);
}

Complex GreenHelmholtz(const Point &x, const Point &y, double kappa)
{
  return GreenHelmholtzDiff(x - y, kappa);
}

Complex GreenHelmholtzDny(const Point &x, const Point &y, const Point &ny, double kappa)
{
  return GreenHelmholtzDnyDiff(x - y, ny, kappa);
}

double GreenLaplace(const Point &x, const Point &y)
{
  const double r = (x - y).norm();
  if (r == 0.0)
  {
    throw DomainError("fundamental solution evaluated at coincident points");
  }
  return -std::log(r) / (2.0 * pi);
}

double GreenLaplaceDny(const Point &x, const Point &y, const Point &ny)
{
  const Point d = x - y;
  const double r2 = d.squaredNorm();
  if (r2 == 0.0)
  {
    throw DomainError("fundamental solution evaluated at coincident points");
  }
  return d.dot(ny) / (2.0 * pi * r2);
}

}  // namespace cvembem
