#pragma once

#include <span>
#include <vector>

#include "homog/grid.hpp"

namespace homog {

/// Convex polygon with counter-clockwise vertices. A single vertex is a
/// point; an empty polygon is invalid.
struct ConvexPolygon {
  std::vector<Point> vertices;

  double area() const;
  double perimeter() const;
  /// Negative inside, positive outside, exact Euclidean distance outside.
  double signed_distance(Point p) const;
  bool contains(Point p, double slack = 0.0) const { return signed_distance(p) <= slack; }
  double support(Point direction) const;
  ConvexPolygon scaled(double s) const;
  ConvexPolygon translated(Point d) const;
};

/// Andrew monotone chain; collinear points are dropped.
ConvexPolygon convex_hull(std::vector<Point> points);

/// Edge-merge Minkowski sum of two convex polygons.
ConvexPolygon minkowski_sum(const ConvexPolygon& a, const ConvexPolygon& b);

/// Regular K-gon approximating a disk (vertices on the circle).
ConvexPolygon disk_polygon(Point center, double radius, int k);

struct Disk {
  Point center{};
  double radius = 1.0;
};

/// Signed distance to the rounded set disk + shape.
double signed_distance_disk_sum(const Disk& d, const ConvexPolygon& shape, Point p);

}  // namespace homog
