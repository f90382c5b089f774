// SPDX-License-Identifier: Apache-2.0

#ifndef CVEMBEM_GEOMETRY_HPP
#define CVEMBEM_GEOMETRY_HPP

#include <Eigen/Core>

namespace cvembem
{

using Point = Eigen::Vector2d;

// Side of the traversal on which the computational domain lies. Ccw: the domain is on the
// left of the curve as the parameter increases.
enum class Orientation
{
  CCW,
  CW
};

//
// Parametrized boundary curve. Circles use the angle t in [0, 2pi] (one extra turn is
// accepted on either side so that arcs may wrap through t = 0), segments use t in [0, 1].
//
class Curve
{
public:
  enum class Kind
  {
    CIRCLE,
    SEGMENT
  };

  static Curve Circle(const Point &center, double radius, Orientation orientation);
  static Curve Segment(const Point &a, const Point &b, Orientation orientation);

  Kind GetKind() const { return kind_; }
  bool IsCircle() const { return kind_ == Kind::CIRCLE; }
  Orientation GetOrientation() const { return orientation_; }
  const Point &Center() const { return p0_; }
  double Radius() const { return radius_; }
  const Point &Start() const { return p0_; }
  const Point &End() const { return p1_; }

  // Canonical parameter interval.
  double TBegin() const;
  double TEnd() const;

  Point Eval(double t) const;
  Point Derivative(double t) const;

  // Eval(t + dt) - Eval(t) without cancellation for small dt.
  Point Chord(double t, double dt) const;

  // Unit normal pointing out of the domain.
  Point OutwardNormal(double t) const;

  bool operator==(const Curve &o) const = default;

private:
  Curve(Kind kind, const Point &p0, const Point &p1, double radius, Orientation o)
    : kind_(kind), orientation_(o), p0_(p0), p1_(p1), radius_(radius)
  {
  }
  void CheckParameter(double t) const;

  Kind kind_;
  Orientation orientation_;
  Point p0_, p1_;  // Center (circle) or endpoints (segment).
  double radius_;
};

//
// Restriction of a curve to [t0, t1], reparametrized by s in [0, 1]. A straight edge is a
// segment curve restricted to [0, 1]. t1 < t0 is allowed and reverses the traversal.
//
struct EdgeMap
{
  Curve curve;
  double t0, t1;

  static EdgeMap Straight(const Point &a, const Point &b);

  bool IsCurved() const { return curve.IsCircle(); }
  double Dt() const { return t1 - t0; }
  double Param(double s) const { return t0 + s * (t1 - t0); }
  Point Eval(double s) const;
  Point Derivative(double s) const;  // d/ds.
  Point Start() const { return Eval(0.0); }
  Point End() const { return Eval(1.0); }

  // Eval(s + ds) - Eval(s), stable for small ds.
  Point Chord(double s, double ds) const;

  // Unit normal on the right of the traversal direction.
  Point RightNormal(double s) const;

  EdgeMap Reversed() const { return {curve, t1, t0}; }
};

}  // namespace cvembem

#endif  // CVEMBEM_GEOMETRY_HPP
