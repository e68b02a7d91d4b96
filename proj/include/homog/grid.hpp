#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace homog {

using Seed = std::uint64_t;

struct Point {
  double x = 0.0;
  double y = 0.0;

  Point& operator+=(Point o) { x += o.x; y += o.y; return *this; }
  Point& operator-=(Point o) { x -= o.x; y -= o.y; return *this; }
  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend Point operator*(Point a, double s) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point a, Point b) = default;
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline Point unit_direction(double angle) { return {std::cos(angle), std::sin(angle)}; }

class InvalidSpec : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised for numerical breakdowns: NaN, range loss, fronts touching the
/// box boundary, deadlines exceeded.
class NumericalAnomaly : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CflViolation : public NumericalAnomaly {
 public:
  using NumericalAnomaly::NumericalAnomaly;
};

/// Uniform node lattice on the box center + [-half_width, half_width]^dim.
/// Nodes per axis is 2*m+1 with m = ceil(half_width / h); in one dimension
/// the y axis collapses to a single row at center.y.
struct Grid {
  int dim = 2;
  double h = 0.1;
  double half_width = 10.0;
  Point center{};
  double dt = 0.0;

  int half_nodes() const { return static_cast<int>(std::ceil(half_width / h - 1e-9)); }
  int nx() const { return 2 * half_nodes() + 1; }
  int ny() const { return dim == 1 ? 1 : nx(); }
  std::size_t size() const { return static_cast<std::size_t>(nx()) * static_cast<std::size_t>(ny()); }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx() + i; }

  Point node(int i, int j) const {
    const int m = half_nodes();
    if (dim == 1) return {center.x + (i - m) * h, center.y};
    return {center.x + (i - m) * h, center.y + (j - m) * h};
  }
  Point node(std::size_t k) const {
    return node(static_cast<int>(k % nx()), static_cast<int>(k / nx()));
  }

  /// Nearest node to p, clamped into the lattice.
  std::size_t nearest(Point p) const;
  bool inside(Point p) const;
  std::string describe() const;
};

/// Discrete subset of a grid's nodes.
struct RegionMask {
  Grid grid;
  std::vector<std::uint8_t> on;

  RegionMask() = default;
  explicit RegionMask(const Grid& g) : grid(g), on(g.size(), 0) {}

  std::size_t count() const;
  bool operator[](std::size_t k) const { return on[k] != 0; }
  bool empty() const { return count() == 0; }
};

/// Squared Euclidean distance (in node units) from every node to the
/// nearest node of the mask; +inf when the mask is empty.
std::vector<double> distance_to_mask(const RegionMask& mask);

/// max over nodes of `a` of the distance to `b`, in physical units.
double directed_hausdorff(const RegionMask& a, const RegionMask& b);
double hausdorff(const RegionMask& a, const RegionMask& b);

/// Nodes of `inner` that are farther than `tolerance` from `outer`.
std::size_t count_outside_dilation(const RegionMask& inner, const RegionMask& outer, double tolerance);

/// Node indices with |node - c| <= r (plus a 1e-9 slack).
std::vector<std::size_t> ball_nodes(const Grid& g, Point c, double r);

}  // namespace homog
