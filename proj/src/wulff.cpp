#include "homog/wulff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>

namespace homog {

double DirectionalSpeedTable::max_w_ci() const {
  return w_ci.empty() ? 0.0 : *std::max_element(w_ci.begin(), w_ci.end());
}

std::vector<Point> sweep_directions(int dim, int k) {
  if (dim == 1) return {{1.0, 0.0}, {-1.0, 0.0}};
  std::vector<Point> out;
  for (int n = 0; n < k; ++n) out.push_back(unit_direction(2.0 * std::numbers::pi * n / k));
  return out;
}

DirectionalSpeedTable estimate_speed_table(const EnvironmentSpec& spec, const SpeedTableOptions& opt) {
  const auto dirs = sweep_directions(spec.dim, opt.directions);
  const int R = static_cast<int>(std::lround(opt.radius));
  if (R < 4 || R % 4 != 0) throw InvalidSpec("speed-table radius must be a positive multiple of 4");
  const std::vector<int> n_grid{R / 4, R / 2, R};

  // One solve per seed yields every direction and radius.
  std::vector<Point> targets;
  for (Point e : dirs)
    for (int n : n_grid) targets.push_back(double(n) * e);
  std::map<Seed, std::vector<double>> cache;
  Grid grid_used;
  auto solve = [&](Seed seed) -> const std::vector<double>& {
    auto it = cache.find(seed);
    if (it != cache.end()) return it->second;
    const Environment env = build_environment(spec, seed);
    const TravelRun run = spec.mode == EnvMode::Kpp ? travel_times_kpp(env, 0.0, {}, targets, opt.front)
                                                    : arrival_times_geq(env, 0.0, {}, targets, opt.front);
    grid_used = run.grid;
    std::vector<double> tau;
    for (const auto& r : run.records) tau.push_back(r.tau);
    return cache.emplace(seed, std::move(tau)).first->second;
  };

  DirectionalSpeedTable table;
  table.dim = spec.dim;
  table.radius = opt.radius;
  table.directions = dirs;
  table.h = opt.front.h;
  for (std::size_t k = 0; k < dirs.size(); ++k) {
    TimedProcess p;
    p.name = "direction_" + std::to_string(k);
    p.sample_origin = [&, k](Seed seed, std::span<const int> ns) {
      const auto& tau = solve(seed);
      std::vector<double> out;
      for (int n : ns) {
        const auto pos = std::find(n_grid.begin(), n_grid.end(), n) - n_grid.begin();
        out.push_back(tau[k * n_grid.size() + pos]);
      }
      return out;
    };
    EstimateOptions eo;
    eo.shared_seeds = true;
    table.estimates.push_back(estimate_limit(p, n_grid, opt.samples, opt.master, eo));
  }

  for (std::size_t k = 0; k < dirs.size(); ++k) {
    const auto& est = table.estimates[k];
    const double tau_bar = opt.increment ? *est.increment : est.limit;
    const double stat = opt.increment ? *est.increment_half_width : est.limit_half_width;
    const double span = opt.increment ? opt.radius / 2.0 : opt.radius;
    if (!(tau_bar > 0.0)) throw NumericalAnomaly("non-positive travel-time slope in direction " + std::to_string(k));
    const double w = 1.0 / tau_bar;
    // Arrival is resolved to one step and one node crossing.
    const double floor = (grid_used.dt + opt.front.h / w) / span;
    table.tau_bar.push_back(tau_bar);
    table.ci.push_back(stat + floor);
    table.w.push_back(w);
    table.w_ci.push_back(w * w * (stat + floor));
    table.resolution = std::max(table.resolution, floor);
  }
  return table;
}

DirectionalSpeedTable table_from_speeds(std::vector<Point> directions, std::vector<double> w, double ci) {
  DirectionalSpeedTable t;
  t.dim = 2;
  t.directions = std::move(directions);
  t.w = std::move(w);
  for (double v : t.w) {
    t.tau_bar.push_back(1.0 / v);
    t.ci.push_back(ci);
    t.w_ci.push_back(v * v * ci);
  }
  return t;
}

WulffShape::WulffShape(std::vector<Point> directions, std::vector<double> speeds)
    : directions_(std::move(directions)), speeds_(std::move(speeds)) {
  if (directions_.size() != speeds_.size()) throw InvalidSpec("direction and speed counts differ");
  for (double w : speeds_)
    if (!(w > 0.0)) throw InvalidSpec("non-positive front speed");
  hull_ = convex_hull(vertices());
}

std::vector<Point> WulffShape::vertices() const {
  std::vector<Point> v;
  for (std::size_t k = 0; k < speeds_.size(); ++k) v.push_back(speeds_[k] * directions_[k]);
  return v;
}

double WulffShape::support(Point e) const {
  double s = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < speeds_.size(); ++k) s = std::max(s, speeds_[k] * dot(directions_[k], e));
  return s;
}

double WulffShape::min_speed() const { return *std::min_element(speeds_.begin(), speeds_.end()); }
double WulffShape::max_speed() const { return *std::max_element(speeds_.begin(), speeds_.end()); }

WulffShape assemble_shape(const DirectionalSpeedTable& table) {
  for (std::size_t k = 0; k < table.size(); ++k) {
    if (!(table.w[k] > 0.0) || !std::isfinite(table.ci[k]))
      throw InvalidSpec("speed table entry " + std::to_string(k) + " is not positive and finite");
  }
  return WulffShape(table.directions, table.w);
}

ConvexityReport check_convexity(const WulffShape& shape, const DirectionalSpeedTable& table, double h) {
  const int K = static_cast<int>(table.size());
  if (K < 8) throw InvalidSpec("convexity check needs at least 8 directions");
  ConvexityReport rep;
  rep.slack = 3.0 * table.max_w_ci();
  rep.worst_margin = std::numeric_limits<double>::infinity();
  const auto& w = table.w;
  const auto& e = table.directions;
  for (int k = 0; k < K; ++k) {
    for (int m = 1; 2 * m < K / 2; ++m) {
      const int a = (k - m + K) % K;
      const int b = (k + m) % K;
      const double rhs = w[a] * w[b] * norm(e[a] + e[b]) / (w[a] + w[b]);
      const double margin = w[k] - rhs + rep.slack;
      ++rep.triples;
      rep.worst_margin = std::min(rep.worst_margin, margin);
      if (margin < 0.0) rep.violations.push_back({k, m, w[k], rhs});
    }
  }
  for (Point v : shape.vertices()) {
    if (shape.hull().signed_distance(v) < -h) ++rep.vertices_off_hull;
  }
  return rep;
}

TableBoundsReport check_table_bounds(const DirectionalSpeedTable& table, double m_emp) {
  TableBoundsReport rep;
  rep.worst_bound_margin = std::numeric_limits<double>::infinity();
  rep.worst_lipschitz_margin = std::numeric_limits<double>::infinity();
  const std::size_t K = table.size();
  const double m3 = m_emp * m_emp * m_emp;
  for (std::size_t k = 0; k < K; ++k) {
    const double tb = table.tau_bar[k];
    const double b = std::min(tb - 1.0 / m_emp, m_emp - tb) + table.ci[k];
    rep.worst_bound_margin = std::min(rep.worst_bound_margin, b);
    if (b < 0.0) ++rep.bound_violations;
    const std::size_t j = (k + 1) % K;
    if (j == k) continue;
    const double dist = norm(table.directions[k] - table.directions[j]);
    const double slack = m3 * dist + table.ci[k] + table.ci[j];
    const double lt = slack - std::abs(tb - table.tau_bar[j]);
    const double lw = m3 * dist + table.w_ci[k] + table.w_ci[j] - std::abs(table.w[k] - table.w[j]);
    const double lm = std::min(lt, lw);
    rep.worst_lipschitz_margin = std::min(rep.worst_lipschitz_margin, lm);
    if (lm < 0.0) ++rep.lipschitz_violations;
  }
  return rep;
}

ConvexPolygon minkowski_sum(const ConvexPolygon& g, double t, const WulffShape& shape) {
  if (t < 0.0) throw InvalidSpec("negative Minkowski scale");
  return minkowski_sum(g, shape.hull().scaled(t));
}

ConvexPolygon minkowski_sum(const Disk& g, double t, const WulffShape& shape, int disk_vertices) {
  return minkowski_sum(disk_polygon(g.center, g.radius, disk_vertices), t, shape);
}

void write_speed_table_csv(std::ostream& os, const DirectionalSpeedTable& table) {
  os << "k,e_x,e_y,tau_bar,ci,w\n";
  os.precision(12);
  for (std::size_t k = 0; k < table.size(); ++k) {
    os << k << "," << table.directions[k].x << "," << table.directions[k].y << "," << table.tau_bar[k] << ","
       << table.ci[k] << "," << table.w[k] << "\n";
  }
}

void write_polygon_csv(std::ostream& os, const std::vector<Point>& vertices) {
  os << "x,y\n";
  os.precision(12);
  for (Point v : vertices) os << v.x << "," << v.y << "\n";
  if (!vertices.empty()) os << vertices.front().x << "," << vertices.front().y << "\n";
}

}  // namespace homog
