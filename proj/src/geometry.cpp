#include "homog/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace homog {

double ConvexPolygon::area() const {
  double a = 0.0;
  const std::size_t n = vertices.size();
  for (std::size_t k = 0; k < n; ++k) a += cross(vertices[k], vertices[(k + 1) % n]);
  return 0.5 * a;
}

double ConvexPolygon::perimeter() const {
  if (vertices.size() < 2) return 0.0;
  double p = 0.0;
  const std::size_t n = vertices.size();
  for (std::size_t k = 0; k < n; ++k) p += norm(vertices[(k + 1) % n] - vertices[k]);
  return p;
}

namespace {

double segment_distance(Point p, Point a, Point b) {
  const Point ab = b - a;
  const double len2 = dot(ab, ab);
  const double s = len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
  return norm(p - (a + s * ab));
}

}  // namespace

double ConvexPolygon::signed_distance(Point p) const {
  const std::size_t n = vertices.size();
  if (n == 0) throw InvalidSpec("empty polygon");
  if (n == 1) return norm(p - vertices[0]);
  double dist = std::numeric_limits<double>::infinity();
  bool inside = n >= 3;
  for (std::size_t k = 0; k < n; ++k) {
    const Point a = vertices[k];
    const Point b = vertices[(k + 1) % n];
    dist = std::min(dist, segment_distance(p, a, b));
    if (cross(b - a, p - a) < 0.0) inside = false;
  }
  return inside ? -dist : dist;
}

double ConvexPolygon::support(Point direction) const {
  double s = -std::numeric_limits<double>::infinity();
  for (Point v : vertices) s = std::max(s, dot(v, direction));
  return s;
}

ConvexPolygon ConvexPolygon::scaled(double s) const {
  ConvexPolygon out = *this;
  for (auto& v : out.vertices) v = s * v;
  if (s == 0.0) out.vertices = {Point{}};
  return out;
}

ConvexPolygon ConvexPolygon::translated(Point d) const {
  ConvexPolygon out = *this;
  for (auto& v : out.vertices) v += d;
  return out;
}

ConvexPolygon convex_hull(std::vector<Point> pts) {
  std::sort(pts.begin(), pts.end(), [](Point a, Point b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return {pts};
  std::vector<Point> hull(2 * pts.size());
  std::size_t k = 0;
  for (const Point& p : pts) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    const Point& p = pts[i];
    while (k >= lower && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0.0) --k;
    hull[k++] = p;
  }
  hull.resize(k - 1);
  return {hull};
}

namespace {

// Rotate so the lowest (then leftmost) vertex comes first.
std::vector<Point> from_bottom(const std::vector<Point>& v) {
  auto it = std::min_element(v.begin(), v.end(), [](Point a, Point b) { return a.y < b.y || (a.y == b.y && a.x < b.x); });
  std::vector<Point> out(it, v.end());
  out.insert(out.end(), v.begin(), it);
  return out;
}

}  // namespace

ConvexPolygon minkowski_sum(const ConvexPolygon& a, const ConvexPolygon& b) {
  if (a.vertices.empty() || b.vertices.empty()) throw InvalidSpec("degenerate polygon in Minkowski sum");
  if (a.vertices.size() < 3 || b.vertices.size() < 3) {
    std::vector<Point> pts;
    for (Point p : a.vertices)
      for (Point q : b.vertices) pts.push_back(p + q);
    return convex_hull(std::move(pts));
  }
  const auto p = from_bottom(a.vertices);
  const auto q = from_bottom(b.vertices);
  const std::size_t n = p.size(), m = q.size();
  std::vector<Point> out;
  std::size_t i = 0, j = 0;
  while (i < n || j < m) {
    out.push_back(p[i % n] + q[j % m]);
    const Point ep = p[(i + 1) % n] - p[i % n];
    const Point eq = q[(j + 1) % m] - q[j % m];
    const double c = cross(ep, eq);
    if (j >= m || (i < n && c > 0.0)) {
      ++i;
    } else if (i >= n || c < 0.0) {
      ++j;
    } else {
      ++i;
      ++j;
    }
  }
  return convex_hull(std::move(out));
}

ConvexPolygon disk_polygon(Point center, double radius, int k) {
  ConvexPolygon poly;
  for (int n = 0; n < k; ++n) poly.vertices.push_back(center + radius * unit_direction(2.0 * std::numbers::pi * n / k));
  return poly;
}

double signed_distance_disk_sum(const Disk& d, const ConvexPolygon& shape, Point p) {
  return shape.signed_distance(p - d.center) - d.radius;
}

}  // namespace homog
