#include "homog/env.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace homog {

namespace {

constexpr double kernel_peak = 15.0 / 16.0;
constexpr double kernel_slope_peak = 1.4433756729740645;  // max |K'| of the biweight

std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) { return splitmix(a ^ splitmix(b)); }

double to_unit(std::uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

// Biweight CDF on [-1, 1].
double biweight_cdf(double z) {
  if (z <= -1.0) return 0.0;
  if (z >= 1.0) return 1.0;
  const double z2 = z * z;
  return 0.5 + kernel_peak * z * (1.0 - 2.0 * z2 / 3.0 + z2 * z2 / 5.0);
}

double biweight(double z) {
  if (z <= -1.0 || z >= 1.0) return 0.0;
  const double q = 1.0 - z * z;
  return kernel_peak * q * q;
}

double lerp(double a, double b, double w) { return w == 0.0 ? a : a + w * (b - a); }

}  // namespace

Seed derive_seed(Seed master, std::initializer_list<std::int64_t> coords) {
  std::uint64_t h = splitmix(master ^ 0x5eedc0deULL);
  for (std::int64_t c : coords) h = mix(h, static_cast<std::uint64_t>(c));
  return h;
}

double hashed_unit(Seed seed, std::uint64_t position) { return to_unit(mix(seed, position)); }

AxisWeight axis_weight(double s, double cell, double radius) {
  const double fm = std::floor(s / cell);
  const auto m = static_cast<std::int64_t>(fm);
  const double p = s - fm * cell;
  if (radius <= 0.0) return {m, 0.0, 0.0};
  if (p < radius) {
    const double z = p / radius;
    return {m - 1, biweight_cdf(z), biweight(z) / radius};
  }
  if (p > cell - radius) {
    const double z = (p - cell) / radius;
    return {m, biweight_cdf(z), biweight(z) / radius};
  }
  return {m, 0.0, 0.0};
}

void EnvironmentSpec::check() const {
  auto fail = [](const std::string& what) { throw InvalidSpec("invalid environment spec: " + what); };
  if (dim != 1 && dim != 2) fail("dimension must be 1 or 2");
  if (!(cell_duration > 0.0)) fail("cell_duration must be positive");
  if (!(cell_size > 0.0)) fail("cell_size must be positive");
  if (!(mollifier_radius >= 0.0)) fail("mollifier_radius must be nonnegative");
  if (mollifier_radius > 0.5 * std::min(cell_duration, cell_size))
    fail("mollifier_radius must not exceed half a cell");
  if (mode == EnvMode::Kpp) {
    if (!(ellipticity > 0.0)) fail("ellipticity must be positive");
    if (!(diffusion_max >= ellipticity)) fail("diffusion_max must be >= ellipticity");
    if (!(drift_max >= 0.0)) fail("drift_max must be nonnegative");
    if (!(growth_min > 0.0)) fail("growth_min must be positive");
    if (!(growth_max >= growth_min)) fail("growth_max must be >= growth_min");
    if (!(drift_max * drift_max < 4.0 * ellipticity * growth_min))
      fail("drift_bound: drift_max^2 must be < 4*ellipticity*growth_min");
  } else {
    if (!(flame_min > 0.0)) fail("flame_min must be positive");
    if (!(flame_max >= flame_min)) fail("flame_max must be >= flame_min");
    if (!(stream_amplitude >= 0.0)) fail("stream_amplitude must be nonnegative");
    if (dim == 1 && stream_amplitude > 0.0) fail("a stream function flow needs dimension 2");
    if (dim == 1 && mean_flow.y != 0.0) fail("mean_flow.y must be 0 in dimension 1");
    if (stream_amplitude > 0.0 && mollifier_radius <= 0.0)
      fail("stream_amplitude > 0 needs a positive mollifier_radius");
  }
}

double EnvironmentSpec::drift_component_max() const {
  return dim == 2 ? drift_max / std::sqrt(2.0) : drift_max;
}

double EnvironmentSpec::flow_max() const {
  if (stream_amplitude == 0.0) return norm(mean_flow);
  const double d = 2.0 * stream_amplitude * kernel_peak / mollifier_radius;
  return norm(mean_flow) + std::sqrt(2.0) * d;
}

double EnvironmentSpec::flow_lipschitz() const {
  if (stream_amplitude == 0.0) return 0.0;
  const double r2 = mollifier_radius * mollifier_radius;
  const double pure = 2.0 * stream_amplitude * kernel_slope_peak / r2;
  const double mixed = 4.0 * stream_amplitude * kernel_peak * kernel_peak / r2;
  return 2.0 * std::max(pure, mixed);
}

double EnvironmentSpec::flame_lipschitz() const {
  if (flame_max == flame_min) return 0.0;
  return std::sqrt(double(dim)) * (flame_max - flame_min) * kernel_peak / mollifier_radius;
}

double ReactionSpec::gap_modulus(double growth_max, double u) const {
  if (form == ReactionForm::Logistic) return growth_max * u;
  return growth_max * std::max(0.0, 2.0 * u - 1.0);
}

std::string to_string(EnvMode m) { return m == EnvMode::Kpp ? "kpp" : "geq"; }
std::string to_string(ReactionForm f) {
  return f == ReactionForm::Logistic ? "logistic" : "piecewise_linear";
}

Environment build_environment(const EnvironmentSpec& spec, Seed seed) {
  spec.check();
  Environment env;
  auto owned = std::make_shared<EnvironmentSpec>(spec);
  owned->seed = seed;
  env.spec_ = std::move(owned);
  env.seed_ = seed;
  const std::uint64_t base = mix(seed, 0x70686173ULL);
  env.phase_t_ = spec.cell_duration * to_unit(mix(base, 1));
  env.phase_x_.x = spec.cell_size * to_unit(mix(base, 2));
  env.phase_x_.y = spec.dim == 2 ? spec.cell_size * to_unit(mix(base, 3)) : 0.0;
  return env;
}

Environment shift(const Environment& env, double s, Point y) {
  Environment out = env;
  out.shift_t_ = env.shift_t_ + s;
  out.shift_x_ = env.shift_x_ + y;
  return out;
}

double Environment::field_range_lo(Field f) const {
  const auto& s = *spec_;
  switch (f) {
    case Field::DiffusionX:
    case Field::DiffusionY: return s.ellipticity;
    case Field::DriftX:
    case Field::DriftY: return -s.drift_component_max();
    case Field::Growth: return s.growth_min;
    case Field::Flame: return s.flame_min;
    case Field::Stream: return -s.stream_amplitude;
  }
  return 0.0;
}

double Environment::field_range_hi(Field f) const {
  const auto& s = *spec_;
  switch (f) {
    case Field::DiffusionX:
    case Field::DiffusionY: return s.diffusion_max;
    case Field::DriftX:
    case Field::DriftY: return s.drift_component_max();
    case Field::Growth: return s.growth_max;
    case Field::Flame: return s.flame_max;
    case Field::Stream: return s.stream_amplitude;
  }
  return 0.0;
}

double Environment::clamp_field(Field f, double v) const {
  return std::clamp(v, field_range_lo(f), field_range_hi(f));
}

double Environment::cell_value(Field f, std::int64_t m, std::int64_t i, std::int64_t j) const {
  const double lo = field_range_lo(f);
  const double hi = field_range_hi(f);
  if (lo == hi) return lo;
  std::uint64_t h = mix(seed_, static_cast<std::uint64_t>(f) + 1);
  h = mix(h, static_cast<std::uint64_t>(m));
  h = mix(h, static_cast<std::uint64_t>(i));
  h = mix(h, static_cast<std::uint64_t>(j));
  return lo + (hi - lo) * to_unit(h);
}

double Environment::plane(Field f, std::int64_t m, const AxisWeight& ax, const AxisWeight& ay) const {
  const bool flat = spec_->dim == 1;
  const std::int64_t j0 = flat ? 0 : ay.index;
  const double row0 = ax.w == 0.0 ? cell_value(f, m, ax.index, j0)
                                  : lerp(cell_value(f, m, ax.index, j0), cell_value(f, m, ax.index + 1, j0), ax.w);
  if (flat || ay.w == 0.0) return row0;
  const double row1 = ax.w == 0.0 ? cell_value(f, m, ax.index, j0 + 1)
                                  : lerp(cell_value(f, m, ax.index, j0 + 1),
                                         cell_value(f, m, ax.index + 1, j0 + 1), ax.w);
  return lerp(row0, row1, ay.w);
}

double Environment::field(Field f, double t, Point x, CellTrace* trace) const {
  const auto& s = *spec_;
  const AxisWeight at = axis_weight(lattice_time(t), s.cell_duration, s.mollifier_radius);
  const AxisWeight ax = axis_weight(lattice_x(x.x), s.cell_size, s.mollifier_radius);
  const AxisWeight ay = s.dim == 2 ? axis_weight(lattice_y(x.y), s.cell_size, s.mollifier_radius) : AxisWeight{};
  if (trace) {
    trace->time_cells.push_back(at.index);
    if (at.w > 0.0) trace->time_cells.push_back(at.index + 1);
  }
  const double p0 = plane(f, at.index, ax, ay);
  const double v = at.w == 0.0 ? p0 : lerp(p0, plane(f, at.index + 1, ax, ay), at.w);
  return clamp_field(f, v);
}

KppCoefficients Environment::kpp(double t, Point x, CellTrace* trace) const {
  KppCoefficients c;
  c.diffusion[0] = field(Field::DiffusionX, t, x, trace);
  c.drift.x = field(Field::DriftX, t, x);
  c.growth = field(Field::Growth, t, x);
  if (spec_->dim == 2) {
    c.diffusion[1] = field(Field::DiffusionY, t, x);
    c.drift.y = field(Field::DriftY, t, x);
  }
  return c;
}

GeqCoefficients Environment::geq(double t, Point x, CellTrace* trace) const {
  const auto& s = *spec_;
  GeqCoefficients c;
  c.flame = field(Field::Flame, t, x, trace);
  c.flow = s.mean_flow;
  if (s.stream_amplitude == 0.0) return c;
  c.stream = field(Field::Stream, t, x);

  const AxisWeight at = axis_weight(lattice_time(t), s.cell_duration, s.mollifier_radius);
  const AxisWeight ax = axis_weight(lattice_x(x.x), s.cell_size, s.mollifier_radius);
  const AxisWeight ay = axis_weight(lattice_y(x.y), s.cell_size, s.mollifier_radius);
  auto grads = [&](std::int64_t m) {
    auto v = [&](std::int64_t di, std::int64_t dj) {
      return cell_value(Field::Stream, m, ax.index + di, ay.index + dj);
    };
    const double v00 = v(0, 0), v10 = v(1, 0), v01 = v(0, 1), v11 = v(1, 1);
    const double dx = lerp(ax.dw * (v10 - v00), ax.dw * (v11 - v01), ay.w);
    const double dy = ay.dw * (lerp(v01, v11, ax.w) - lerp(v00, v10, ax.w));
    return Point{dx, dy};
  };
  Point g = grads(at.index);
  if (at.w != 0.0) {
    const Point g1 = grads(at.index + 1);
    g = {lerp(g.x, g1.x, at.w), lerp(g.y, g1.y, at.w)};
  }
  c.flow += Point{g.y, -g.x};
  return c;
}

Coefficients evaluate(const Environment& env, double t, Point x) {
  if (env.spec().mode == EnvMode::Kpp) return env.kpp(t, x);
  return env.geq(t, x);
}

double temporal_dependence_range(const EnvironmentSpec& spec) {
  return spec.cell_duration + 2.0 * spec.mollifier_radius;
}

bool ValidationReport::ok() const {
  return std::all_of(items.begin(), items.end(), [](const auto& r) { return r.pass; });
}

const HypothesisResult* ValidationReport::first_failure() const {
  for (const auto& r : items)
    if (!r.pass) return &r;
  return nullptr;
}

const HypothesisResult* ValidationReport::find(const std::string& name) const {
  for (const auto& r : items)
    if (r.name == name) return &r;
  return nullptr;
}

std::string ValidationReport::to_text() const {
  std::ostringstream os;
  for (const auto& r : items) {
    os << (r.pass ? "PASS " : "FAIL ") << r.name << " margin=" << r.margin;
    if (!r.detail.empty()) os << " (" << r.detail << ")";
    os << "\n";
  }
  return os.str();
}

namespace {

// Mean flow over the box [x0, x0+L]^2 from boundary integrals of the
// stream function (trapezoid rule).
Point box_average_flow(const Environment& env, double t, Point x0, double side, double step) {
  const int n = std::max(2, static_cast<int>(std::ceil(side / step)));
  const double ds = side / n;
  double top = 0.0, bottom = 0.0, left = 0.0, right = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double w = (k == 0 || k == n) ? 0.5 : 1.0;
    const double s = k * ds;
    bottom += w * env.field(Field::Stream, t, {x0.x + s, x0.y});
    top += w * env.field(Field::Stream, t, {x0.x + s, x0.y + side});
    left += w * env.field(Field::Stream, t, {x0.x, x0.y + s});
    right += w * env.field(Field::Stream, t, {x0.x + side, x0.y + s});
  }
  const double area = side * side;
  // v = (d psi/dy, -d psi/dx)
  const Point mean = env.spec().mean_flow;
  return {mean.x + (top - bottom) * ds / area, mean.y - (right - left) * ds / area};
}

}  // namespace

ValidationReport validate_hypotheses(const EnvironmentSpec& spec, const ReactionSpec& reaction,
                                     int flow_samples) {
  ValidationReport rep;
  auto add = [&](std::string name, bool pass, double margin, std::string detail) {
    rep.items.push_back({std::move(name), pass, margin, std::move(detail)});
  };

  EnvironmentSpec base = spec;
  const bool kpp = spec.mode == EnvMode::Kpp;
  // Check everything except the drift bound, which is reported separately.
  if (kpp) base.drift_max = 0.0;
  try {
    base.check();
    add("spec_ranges", true, 0.0, "");
  } catch (const InvalidSpec& e) {
    add("spec_ranges", false, -1.0, e.what());
    return rep;
  }

  const double tdep = temporal_dependence_range(spec);
  if (kpp) {
    const double margin = 4.0 * spec.ellipticity * spec.growth_min - spec.drift_max * spec.drift_max;
    add("drift_bound", margin > 0.0, margin, "4*ellipticity*growth_min - drift_max^2");

    add("reaction_endpoints", reaction.value(spec.growth_max, 0.0) == 0.0 && reaction.value(spec.growth_max, 1.0) == 0.0,
        0.0, "f(0) = f(1) = 0");

    double linear_margin = 1e300;
    double positive_margin = 1e300;
    for (int k = 1; k < 1000; ++k) {
      const double u = k / 1000.0;
      for (double g : {spec.growth_min, spec.growth_max}) {
        linear_margin = std::min(linear_margin, g * u - reaction.value(g, u));
      }
      positive_margin = std::min(positive_margin, reaction.lower_bound(spec.growth_min, u) /
                                                      (spec.growth_min * std::min(u, 1.0 - u)));
    }
    add("kpp_linear_bound", linear_margin >= 0.0, linear_margin, "min of g*u - f(u) on [0,1]");
    add("positive_reaction", positive_margin > 0.0, positive_margin,
        "f_0(u) / (g_min*min(u,1-u)) on (0,1)");

    std::ostringstream mod;
    double gap_excess = -1e300;
    double prev = 1e300;
    bool decreasing = true;
    for (double u : {1e-1, 1e-2, 1e-3}) {
      const double psi = reaction.gap_modulus(spec.growth_max, u);
      for (double g : {spec.growth_min, spec.growth_max})
        gap_excess = std::max(gap_excess, (g - reaction.value(g, u) / u) - psi);
      decreasing = decreasing && psi <= prev;
      prev = psi;
      mod << "psi(" << u << ")=" << psi << " ";
    }
    add("vanishing_gap", gap_excess <= 1e-12 && decreasing, -gap_excess, mod.str());
  } else {
    add("flame_positive", spec.flame_min > 0.0, spec.flame_min, "flame_min");

    double worst = norm(spec.mean_flow);
    std::ostringstream detail;
    if (spec.stream_amplitude > 0.0) {
      const double step = std::min(spec.cell_size, spec.mollifier_radius) / 4.0;
      for (double factor : {4.0, 16.0, 64.0}) {
        const double side = factor * spec.cell_size;
        double sup = 0.0;
        for (int k = 0; k < flow_samples; ++k) {
          const std::uint64_t h = mix(mix(spec.seed, 0x47633400ULL + static_cast<std::uint64_t>(factor)), k);
          const Environment e = build_environment(spec, h);
          const double t = 1000.0 * to_unit(mix(h, 1));
          const Point x0{1000.0 * to_unit(mix(h, 2)), 1000.0 * to_unit(mix(h, 3))};
          sup = std::max(sup, norm(box_average_flow(e, t, x0, side, step)));
        }
        detail << "L=" << side << ":" << sup << " ";
        if (factor == 64.0) worst = sup;
      }
    }
    const double margin = spec.flame_min - worst;
    detail << "flame_min=" << spec.flame_min;
    add("mean_flow_bound", margin > 0.0, margin, detail.str());
    add("divergence_free", true, 0.0, "flow is the discrete curl of a stream function (by construction)");
  }
  add("finite_dependence", true, tdep, "temporal dependence range (by construction)");
  add("mixing_rate", true, 0.0, "mixing coefficient vanishes beyond the dependence range, any exponent (by construction)");
  return rep;
}

FieldSampler::FieldSampler(Environment env, const Grid& grid, int ghost, std::vector<Field> fields)
    : env_(std::move(env)), ghost_(ghost), fields_(std::move(fields)) {
  const auto& s = env_.spec();
  nx_ = grid.nx() + 2 * ghost;
  ny_ = grid.dim == 1 ? 1 : grid.ny() + 2 * ghost;
  wx_.resize(nx_);
  for (int i = 0; i < nx_; ++i) {
    const Point p = grid.node(i - ghost, 0);
    wx_[i] = axis_weight(env_.lattice_x(p.x), s.cell_size, s.mollifier_radius);
  }
  wy_.resize(ny_);
  for (int j = 0; j < ny_; ++j) {
    if (grid.dim == 1) {
      wy_[j] = AxisWeight{};
    } else {
      const Point p = grid.node(0, j - ghost);
      wy_[j] = axis_weight(env_.lattice_y(p.y), s.cell_size, s.mollifier_radius);
    }
  }
  blended_.resize(fields_.size());
  for (Field f : fields_) {
    lo_.push_back(env_.field_range_lo(f));
    hi_.push_back(env_.field_range_hi(f));
  }
}

int FieldSampler::slot(Field f) const {
  for (std::size_t k = 0; k < fields_.size(); ++k)
    if (fields_[k] == f) return static_cast<int>(k);
  throw std::invalid_argument("field not sampled");
}

const FieldSampler::Slab& FieldSampler::slab(std::int64_t m) {
  for (const auto& s : cache_)
    if (s.m == m) return s;
  if (cache_.size() >= 3) {
    // Evict the slab farthest from the requested cell; its neighbours stay.
    auto far = std::max_element(cache_.begin(), cache_.end(), [m](const Slab& a, const Slab& b) {
      return std::abs(a.m - m) < std::abs(b.m - m);
    });
    cache_.erase(far);
  }
  Slab s;
  s.m = m;
  const bool flat = env_.spec().dim == 1;
  const std::int64_t i0 = wx_.front().index, i1 = wx_.back().index + 1;
  const std::int64_t j0 = flat ? 0 : wy_.front().index, j1 = flat ? 0 : wy_.back().index + 1;
  const std::size_t cw = static_cast<std::size_t>(i1 - i0 + 1);
  std::vector<double> cells(cw * static_cast<std::size_t>(j1 - j0 + 1));
  const std::size_t n = static_cast<std::size_t>(nx_) * ny_;
  for (std::size_t q = 0; q < fields_.size(); ++q) {
    const Field f = fields_[q];
    for (std::int64_t j = j0; j <= j1; ++j)
      for (std::int64_t i = i0; i <= i1; ++i) cells[(j - j0) * cw + (i - i0)] = env_.cell_value(f, m, i, j);
    auto cell = [&](std::int64_t i, std::int64_t j) { return cells[(j - j0) * cw + (i - i0)]; };
    std::vector<double> raw(n), clamped(n);
    for (int j = 0; j < ny_; ++j) {
      const AxisWeight& ay = wy_[j];
      const std::int64_t jj = flat ? 0 : ay.index;
      for (int i = 0; i < nx_; ++i) {
        const AxisWeight& ax = wx_[i];
        const std::size_t k = static_cast<std::size_t>(j) * nx_ + i;
        // Same operation order as Environment::plane.
        double v = ax.w == 0.0 ? cell(ax.index, jj) : lerp(cell(ax.index, jj), cell(ax.index + 1, jj), ax.w);
        if (!flat && ay.w != 0.0) {
          const double row1 =
              ax.w == 0.0 ? cell(ax.index, jj + 1) : lerp(cell(ax.index, jj + 1), cell(ax.index + 1, jj + 1), ax.w);
          v = lerp(v, row1, ay.w);
        }
        raw[k] = v;
        clamped[k] = std::clamp(v, lo_[q], hi_[q]);
      }
    }
    s.raw.push_back(std::move(raw));
    s.clamped.push_back(std::move(clamped));
  }
  cache_.push_back(std::move(s));
  return cache_.back();
}

std::span<const double> FieldSampler::at(Field f, double t) {
  const auto& s = env_.spec();
  const int k = slot(f);
  const AxisWeight at = axis_weight(env_.lattice_time(t), s.cell_duration, s.mollifier_radius);
  if (at.w == 0.0) return slab(at.index).clamped[k];
  // Both slabs must be resident before taking references.
  slab(at.index);
  slab(at.index + 1);
  const Slab* s0 = nullptr;
  const Slab* s1 = nullptr;
  for (const auto& c : cache_) {
    if (c.m == at.index) s0 = &c;
    if (c.m == at.index + 1) s1 = &c;
  }
  const double* a = s0->raw[k].data();
  const double* b = s1->raw[k].data();
  const std::size_t n = s0->raw[k].size();
  const double w = at.w, lo = lo_[k], hi = hi_[k];
  auto& out = blended_[k];
  out.resize(n);
  for (std::size_t q = 0; q < n; ++q) out[q] = std::clamp(a[q] + w * (b[q] - a[q]), lo, hi);
  return out;
}

}  // namespace homog
