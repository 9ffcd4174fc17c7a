#pragma once

// Independent reference for the elastic catenary: integrates the line
// equilibrium along the unstretched arc length with RK4 and shoots on the
// fairlead tension components (H, V) until the end point hits the target.

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace oracle {

struct LineEnd {
  double x = 0.0;
  double z = 0.0;
};

// Integrates from the anchor (s = 0) to the fairlead (s = length).
inline LineEnd integrate_line(double h, double v_fair, double length, double w, double ea,
                              int steps = 4000) {
  const double v_anchor = v_fair - w * length;
  const double grounded = v_anchor < 0.0 ? length - v_fair / w : 0.0;
  LineEnd end;
  end.x = grounded * (1.0 + h / ea);  // seabed part, frictionless
  const double s0 = grounded;
  const double ds = (length - s0) / steps;
  auto rhs = [&](double s) {
    const double v = grounded > 0.0 ? w * (s - grounded) : v_anchor + w * s;
    const double t = std::hypot(h, v);
    if (t == 0.0) return Eigen::Vector2d(0.0, 1.0);
    const double stretch = 1.0 + t / ea;
    return Eigen::Vector2d(h / t * stretch, v / t * stretch);
  };
  Eigen::Vector2d p(end.x, 0.0);
  for (int i = 0; i < steps; ++i) {
    const double s = s0 + i * ds;
    const Eigen::Vector2d k1 = rhs(s);
    const Eigen::Vector2d k2 = rhs(s + 0.5 * ds);
    const Eigen::Vector2d k4 = rhs(s + ds);
    p += ds / 6.0 * (k1 + 4.0 * k2 + k4);  // k2 == k3: rhs depends on s only
  }
  return {p(0), p(1)};
}

struct Tensions {
  double h = 0.0;
  double v = 0.0;
};

// Hanging-chain limit: the line reaches the fairlead with H = 0 whenever the
// grounded part can take up the horizontal span.
inline Tensions shoot_catenary(double x, double z, double length, double w, double ea) {
  const double s_hang = (std::sqrt(1.0 + 2.0 * w * z / ea) - 1.0) * ea / w;
  if (x <= length - s_hang) return {0.0, w * s_hang};
  // Start from the inextensible catenary with a moderate horizontal tension.
  Eigen::Vector2d q(std::log(w * 50.0), w * z * 1.2);  // (log H, V)
  for (int it = 0; it < 200; ++it) {
    auto miss = [&](const Eigen::Vector2d& qq) {
      const LineEnd e = integrate_line(std::exp(qq(0)), qq(1), length, w, ea);
      return Eigen::Vector2d(e.x - x, e.z - z);
    };
    const Eigen::Vector2d r = miss(q);
    if (r.norm() < 1e-9 * length) return {std::exp(q(0)), q(1)};
    Eigen::Matrix2d j;
    for (int k = 0; k < 2; ++k) {
      Eigen::Vector2d dq = Eigen::Vector2d::Zero();
      dq(k) = k == 0 ? 1e-7 : 1e-7 * std::max(1.0, std::abs(q(1)));
      j.col(k) = (miss(q + dq) - miss(q - dq)) / (2.0 * dq(k));
    }
    Eigen::Vector2d step = -j.partialPivLu().solve(r);
    double lam = 1.0;
    while (lam > 1e-6 && miss(q + lam * step).norm() >= r.norm()) lam *= 0.5;
    q += lam * step;
  }
  throw std::runtime_error("shooting did not converge");
}

}  // namespace oracle
