#pragma once
// Brute-force references used only by the tests. Deliberately slow and
// independent of the library's root finders.

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>

#include "polybill/dynamics.hpp"

namespace oracle {

using polybill::Vec;
using polybill::Vec2;
using polybill::Vec3;

inline Vec central_diff(const std::function<Vec(double)>& f, double t, double h = 1e-6) {
  return (f(t + h) - f(t - h)) / (2.0 * h);
}

// First sign change of f on (lo, hi] sampled with n intervals, refined by
// plain bisection. Samples where f is undefined are skipped.
inline std::optional<double> first_root(const std::function<std::optional<double>(double)>& f, double lo, double hi,
                                        long n) {
  const double h = (hi - lo) / static_cast<double>(n);
  std::optional<double> prev;
  double prev_x = lo;
  for (long i = 0; i <= n; ++i) {
    const double x = lo + h * static_cast<double>(i);
    const auto fx = f(x);
    if (!fx) {
      prev.reset();
      continue;
    }
    if (prev && ((*prev < 0.0) != (*fx < 0.0) || *fx == 0.0) && *prev != 0.0) {
      double a = prev_x, b = x;
      const bool a_neg = *prev < 0.0;
      for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(b)); ++it) {
        const double m = 0.5 * (a + b);
        const auto fm = f(m);
        if (!fm) break;
        if ((*fm < 0.0) == a_neg) a = m;
        else b = m;
      }
      return 0.5 * (a + b);
    }
    prev = fx;
    prev_x = x;
  }
  return std::nullopt;
}

// Ray length to the first exit from a region described by phi <= 0.
inline std::optional<double> ray_exit(const std::function<std::optional<double>(const Vec&)>& phi, const Vec& x,
                                      const Vec& v, double max_len, long n) {
  return first_root([&](double l) { return phi(x + l * v); }, 1e-7, max_len, n);
}

// Forward wire root: smallest sigma in (t, t + window) with equal angles.
inline std::optional<double> wire_forward_root(const polybill::WireTable& table, const polybill::WireChord& ch,
                                               double window, long n) {
  const auto& c = table.curve();
  const Vec end = c.eval(ch.t);
  const Vec din = end - c.eval(ch.s);
  const Vec tau = c.deriv(ch.t).normalized();
  const double in = din.normalized().dot(tau);
  auto g = [&](double sigma) -> std::optional<double> {
    const Vec d = c.eval(sigma) - end;
    if (d.norm() < 1e-8) return std::nullopt;
    return d.normalized().dot(tau) - in;
  };
  return first_root(g, ch.t + 1e-6, ch.t + window - 1e-6, n);
}

// Corner of the confocal tetragon: Newton on the pair of conic equations
// Z^2/s + R^2/(s + D) = 1 for s = se and s = sh, unknowns (R^2, Z^2).
inline Vec2 conic_corner(double se, double sh, double d) {
  Vec2 q(1.0, 1.0);  // (R^2, Z^2)
  for (int it = 0; it < 50; ++it) {
    Eigen::Matrix2d jac;
    jac << 1.0 / (se + d), 1.0 / se, 1.0 / (sh + d), 1.0 / sh;
    const Vec2 r(q[0] / (se + d) + q[1] / se - 1.0, q[0] / (sh + d) + q[1] / sh - 1.0);
    q -= jac.fullPivLu().solve(r);
  }
  return Vec2(std::sqrt(q[0]), std::sqrt(q[1]));
}

}  // namespace oracle
