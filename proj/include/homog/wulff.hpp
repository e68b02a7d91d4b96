#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "homog/env.hpp"
#include "homog/geometry.hpp"
#include "homog/subadd.hpp"
#include "homog/ttime.hpp"

namespace homog {

struct SpeedTableOptions {
  int directions = 32;
  double radius = 40.0;
  int samples = 4;
  Seed master = 0;
  FrontOptions front{};
  /// Use (tau(R) - tau(R/2)) / (R/2) instead of tau(R) / R.
  bool increment = true;
};

struct DirectionalSpeedTable {
  int dim = 2;
  double radius = 0.0;
  std::vector<Point> directions;
  std::vector<double> tau_bar;
  std::vector<double> ci;  // half-width on tau_bar
  std::vector<double> w;
  std::vector<double> w_ci;
  std::vector<ConvergenceEstimate> estimates;
  double resolution = 0.0;  // grid floor included in every ci
  double h = 0.0;

  std::size_t size() const { return directions.size(); }
  double max_w_ci() const;
};

std::vector<Point> sweep_directions(int dim, int k);

DirectionalSpeedTable estimate_speed_table(const EnvironmentSpec& spec, const SpeedTableOptions& opt);

/// Speeds fixed in closed form (tests and analytic references).
DirectionalSpeedTable table_from_speeds(std::vector<Point> directions, std::vector<double> w, double ci = 0.0);

class WulffShape {
 public:
  WulffShape() = default;
  explicit WulffShape(std::vector<Point> directions, std::vector<double> speeds);

  const std::vector<Point>& directions() const { return directions_; }
  const std::vector<double>& speeds() const { return speeds_; }
  std::vector<Point> vertices() const;
  const ConvexPolygon& hull() const { return hull_; }

  /// c*(e) = max_k w_k (e_k . e).
  double support(Point e) const;
  double min_speed() const;
  double max_speed() const;

 private:
  std::vector<Point> directions_;
  std::vector<double> speeds_;
  ConvexPolygon hull_;
};

WulffShape assemble_shape(const DirectionalSpeedTable& table);

struct ConvexityViolation {
  int k = 0;
  int m = 0;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct ConvexityReport {
  int triples = 0;
  double slack = 0.0;
  double worst_margin = 0.0;
  std::vector<ConvexityViolation> violations;
  int vertices_off_hull = 0;
  bool ok() const { return violations.empty() && vertices_off_hull == 0; }
};

/// Bisector inequality w(e_k) >= w1 w2 |e1 + e2| / (w1 + w2) - 3 max ci over
/// all pairs (e_{k-m}, e_{k+m}) with angle below pi, plus every radial vertex
/// lying within h of the hull boundary.
ConvexityReport check_convexity(const WulffShape& shape, const DirectionalSpeedTable& table, double h);

struct TableBoundsReport {
  int bound_violations = 0;
  int lipschitz_violations = 0;
  double worst_bound_margin = 0.0;
  double worst_lipschitz_margin = 0.0;
  bool ok() const { return bound_violations == 0 && lipschitz_violations == 0; }
};

TableBoundsReport check_table_bounds(const DirectionalSpeedTable& table, double m_emp);

/// G + t S using the hull of the radial polygon.
ConvexPolygon minkowski_sum(const ConvexPolygon& g, double t, const WulffShape& shape);
ConvexPolygon minkowski_sum(const Disk& g, double t, const WulffShape& shape, int disk_vertices = 256);

void write_speed_table_csv(std::ostream& os, const DirectionalSpeedTable& table);
void write_polygon_csv(std::ostream& os, const std::vector<Point>& vertices);

}  // namespace homog
