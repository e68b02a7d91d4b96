#include "homog/grid.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace homog {

std::size_t Grid::nearest(Point p) const {
  const int m = half_nodes();
  auto snap = [&](double v, double c, int n) {
    const int i = static_cast<int>(std::lround((v - c) / h)) + m;
    return std::clamp(i, 0, n - 1);
  };
  const int i = snap(p.x, center.x, nx());
  const int j = dim == 1 ? 0 : snap(p.y, center.y, ny());
  return index(i, j);
}

bool Grid::inside(Point p) const {
  const double r = half_nodes() * h;
  if (std::abs(p.x - center.x) > r) return false;
  return dim == 1 || std::abs(p.y - center.y) <= r;
}

std::string Grid::describe() const {
  std::ostringstream os;
  os << "d=" << dim << ";h=" << h << ";box=" << half_width << ";center=(" << center.x << ","
     << center.y << ");dt=" << dt;
  return os.str();
}

std::size_t RegionMask::count() const {
  return static_cast<std::size_t>(std::count(on.begin(), on.end(), std::uint8_t{1}));
}

namespace {

// Felzenszwalb-Huttenlocher 1D squared distance transform.
void edt_1d(const double* f, double* d, int n, std::vector<int>& v, std::vector<double>& z) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == inf) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -inf;
      z[1] = inf;
      continue;
    }
    double s;
    while (true) {
      const int p = v[k];
      s = ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * q - 2.0 * p);
      if (s <= z[k]) {
        if (--k < 0) break;
      } else {
        break;
      }
    }
    ++k;
    v[k] = q;
    z[k] = k == 0 ? -inf : s;
    z[k + 1] = inf;
  }
  if (k < 0) {
    std::fill(d, d + n, inf);
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[j + 1] < q) ++j;
    const double dq = q - v[j];
    d[q] = dq * dq + f[v[j]];
  }
}

}  // namespace

std::vector<double> distance_to_mask(const RegionMask& mask) {
  const Grid& g = mask.grid;
  const int nx = g.nx();
  const int ny = g.ny();
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> f(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) f[k] = mask.on[k] ? 0.0 : inf;

  const int n = std::max(nx, ny);
  std::vector<int> v(n + 1);
  std::vector<double> z(n + 2), in(n), out(n);
  for (int j = 0; j < ny; ++j) {
    edt_1d(&f[g.index(0, j)], out.data(), nx, v, z);
    std::copy(out.begin(), out.begin() + nx, f.begin() + g.index(0, j));
  }
  if (ny > 1) {
    for (int i = 0; i < nx; ++i) {
      for (int j = 0; j < ny; ++j) in[j] = f[g.index(i, j)];
      edt_1d(in.data(), out.data(), ny, v, z);
      for (int j = 0; j < ny; ++j) f[g.index(i, j)] = out[j];
    }
  }
  return f;
}

double directed_hausdorff(const RegionMask& a, const RegionMask& b) {
  if (a.empty()) return 0.0;
  if (b.empty()) return std::numeric_limits<double>::infinity();
  const auto d2 = distance_to_mask(b);
  double worst = 0.0;
  for (std::size_t k = 0; k < d2.size(); ++k) {
    if (a.on[k]) worst = std::max(worst, d2[k]);
  }
  return std::sqrt(worst) * a.grid.h;
}

double hausdorff(const RegionMask& a, const RegionMask& b) {
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

std::size_t count_outside_dilation(const RegionMask& inner, const RegionMask& outer, double tolerance) {
  const auto d2 = distance_to_mask(outer);
  const double lim = tolerance / inner.grid.h;
  std::size_t bad = 0;
  for (std::size_t k = 0; k < d2.size(); ++k) {
    if (inner.on[k] && std::sqrt(d2[k]) > lim + 1e-9) ++bad;
  }
  return bad;
}

std::vector<std::size_t> ball_nodes(const Grid& g, Point c, double r) {
  std::vector<std::size_t> out;
  const int m = g.half_nodes();
  const int span = static_cast<int>(std::ceil(r / g.h)) + 1;
  const int ci = static_cast<int>(std::lround((c.x - g.center.x) / g.h)) + m;
  const int cj = g.dim == 1 ? 0 : static_cast<int>(std::lround((c.y - g.center.y) / g.h)) + m;
  const int j0 = g.dim == 1 ? 0 : std::max(0, cj - span);
  const int j1 = g.dim == 1 ? 0 : std::min(g.ny() - 1, cj + span);
  for (int j = j0; j <= j1; ++j) {
    for (int i = std::max(0, ci - span); i <= std::min(g.nx() - 1, ci + span); ++i) {
      if (norm(g.node(i, j) - c) <= r + 1e-9) out.push_back(g.index(i, j));
    }
  }
  return out;
}

}  // namespace homog
