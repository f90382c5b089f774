// SPDX-License-Identifier: Apache-2.0

#include "cvembem/geometry.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include "cvembem/errors.hpp"

namespace cvembem
{

namespace
{

constexpr double param_slack = 1.0e-12;

}  // namespace

Curve Curve::Circle(const Point &center, double radius, Orientation orientation)
{
  if (!(radius > 0.0) || !std::isfinite(radius))
  {
    throw DomainError("circle radius must be positive and finite");
  }
  return Curve(Kind::CIRCLE, center, center, radius, orientation);
}

Curve Curve::Segment(const Point &a, const Point &b, Orientation orientation)
{
  if ((b - a).norm() == 0.0)
  {
    throw DomainError("segment endpoints coincide");
  }
  return Curve(Kind::SEGMENT, a, b, 0.0, orientation);
}

double Curve::TBegin() const
{
  return 0.0;
}

double Curve::TEnd() const
{
  return IsCircle() ? 2.0 * std::numbers::pi : 1.0;
}

void Curve::CheckParameter(double t) const
{
  const double lo = IsCircle() ? -2.0 * std::numbers::pi : 0.0;
  const double hi = IsCircle() ? 4.0 * std::numbers::pi : 1.0;
  if (!(t >= lo - param_slack && t <= hi + param_slack))
  {
    throw DomainError("curve parameter " + std::to_string(t) + " outside [" +
                      std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
}

Point Curve::Eval(double t) const
{
  CheckParameter(t);
  if (IsCircle())
  {
    return p0_ + radius_ * Point(std::cos(t), std::sin(t));
  }
  return p0_ + t * (p1_ - p0_);
}

Point Curve::Derivative(double t) const
{
  CheckParameter(t);
  if (IsCircle())
  {
    return radius_ * Point(-std::sin(t), std::cos(t));
  }
  return p1_ - p0_;
}

Point Curve::Chord(double t, double dt) const
{
  CheckParameter(t);
  CheckParameter(t + dt);
  if (IsCircle())
  {
    const double m = t + 0.5 * dt, s = 2.0 * radius_ * std::sin(0.5 * dt);
    return s * Point(-std::sin(m), std::cos(m));
  }
  return dt * (p1_ - p0_);
}

Point Curve::OutwardNormal(double t) const
{
  const Point d = Derivative(t);
  const Point right = Point(d.y(), -d.x()) / d.norm();
  return (orientation_ == Orientation::CCW) ? right : Point(-right);
}

EdgeMap EdgeMap::Straight(const Point &a, const Point &b)
{
  return {Curve::Segment(a, b, Orientation::CCW), 0.0, 1.0};
}

Point EdgeMap::Eval(double s) const
{
  return curve.Eval(Param(s));
}

Point EdgeMap::Derivative(double s) const
{
  return Dt() * curve.Derivative(Param(s));
}

Point EdgeMap::Chord(double s, double ds) const
{
  return curve.Chord(Param(s), ds * Dt());
}

Point EdgeMap::RightNormal(double s) const
{
  const Point d = Derivative(s);
  return Point(d.y(), -d.x()) / d.norm();
}

}  // namespace cvembem
