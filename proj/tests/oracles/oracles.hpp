#pragma once

// Reference solutions that share no code with the library.

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

// u_t = u_xx + u(1 - u) on [-L, L] from 1/2 on [-1, 1], explicit scheme on a
// fine grid. Front position is the rightmost point with u >= 1/2, located by
// linear interpolation between nodes.
class KppLine {
 public:
  explicit KppLine(double h = 0.02, double L = 140.0) : h_(h), n_(static_cast<int>(std::lround(L / h))) {
    u_.assign(2 * n_ + 1, 0.0);
    for (int i = 0; i <= 2 * n_; ++i)
      if (std::abs(x(i)) <= 1.0 + 1e-12) u_[i] = 0.5;
    dt_ = 0.4 * h * h;
  }

  double x(int i) const { return (i - n_) * h_; }
  double time() const { return t_; }

  void advance(double T) {
    std::vector<double> next(u_.size(), 0.0);
    while (t_ < T - 1e-12) {
      const double dt = std::min(dt_, T - t_);
      for (int i = 1; i < 2 * n_; ++i) {
        const double c = u_[i];
        next[i] = c + dt * ((u_[i - 1] - 2 * c + u_[i + 1]) / (h_ * h_) + c * (1 - c));
      }
      u_.swap(next);
      t_ += dt;
    }
  }

  double front() const {
    for (int i = 2 * n_ - 1; i >= 0; --i)
      if (u_[i] >= 0.5) return x(i) + h_ * (u_[i] - 0.5) / (u_[i] - u_[i + 1]);
    return 0.0;
  }

  // First time the whole segment [r - 1, r + 1] reaches 1/2, sampled every
  // `every` time units.
  double travel_time(double r, double every = 0.01) {
    for (;;) {
      if (front() >= r + 1.0) return t_;
      advance(t_ + every);
    }
  }

 private:
  double h_;
  int n_;
  double dt_ = 0.0;
  double t_ = 0.0;
  std::vector<double> u_;
};

// Speed of the 1D front from the increment of its position over [T/2, T].
inline double kpp_line_speed(double T, double h = 0.02) {
  KppLine line(h, 2.5 * T + 20.0);
  line.advance(T / 2);
  const double a = line.front();
  line.advance(T);
  return (line.front() - a) / (T / 2);
}

// sup of the radial bump (1 - |y|^2/4)^2 over the disk of radius c t around
// x - v t: the bump decreases in |y|, so the sup sits at the point nearest 0.
inline double bump_dilation(double t, double x, double y, double c, double vx, double vy) {
  const double r = std::max(std::hypot(x - vx * t, y - vy * t) - c * t, 0.0);
  if (r >= 2.0) return 0.0;
  const double q = 1.0 - r * r / 4.0;
  return q * q;
}

}  // namespace oracle
