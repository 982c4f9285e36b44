#pragma once

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

namespace polybill::roots {

struct Bracket {
  double lo;
  double hi;
  double f_lo;
  double f_hi;
};

/// Samples f at n + 1 equispaced points of [lo, hi] and returns every
/// interval where the sign changes, in increasing order. f may return an
/// empty optional where it is undefined; such samples break the scan.
template <class F>
std::vector<Bracket> scan_brackets(F&& f, double lo, double hi, int n) {
  std::vector<Bracket> out;
  const double h = (hi - lo) / n;
  double prev_x = 0.0, prev_f = 0.0;
  bool have_prev = false;
  for (int i = 0; i <= n; ++i) {
    const double x = (i == n) ? hi : lo + i * h;
    const std::optional<double> fx = f(x);
    if (!fx || !std::isfinite(*fx)) {
      have_prev = false;
      continue;
    }
    if (have_prev && prev_f != 0.0 && (*fx == 0.0 || (prev_f < 0.0) != (*fx < 0.0)))
      out.push_back({prev_x, x, prev_f, *fx});
    prev_x = x;
    prev_f = *fx;
    have_prev = true;
  }
  return out;
}

/// Plain bisection on a sign-change bracket until the bracket is below xtol.
template <class F>
double bisect(F&& f, Bracket b, double xtol) {
  double lo = b.lo, hi = b.hi;
  const bool lo_negative = b.f_lo < 0.0;
  if (b.f_hi == 0.0) return hi;
  for (int it = 0; it < 200 && (hi - lo) > xtol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const std::optional<double> fm = f(mid);
    if (!fm) break;
    if (*fm == 0.0) return mid;
    if ((*fm < 0.0) == lo_negative)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

/// Newton iterations kept inside [lo, hi]; the iterate with the smallest
/// |f| is returned, so a polish never makes the bisection answer worse.
template <class F, class DF>
double newton_polish(F&& f, DF&& df, double x, double lo, double hi, int max_iter) {
  std::optional<double> fx = f(x);
  if (!fx) return x;
  double best = x, best_abs = std::abs(*fx);
  for (int it = 0; it < max_iter && best_abs > 0.0; ++it) {
    const std::optional<double> d = df(x);
    if (!d || *d == 0.0 || !std::isfinite(*d)) break;
    const double next = x - *fx / *d;
    if (!(next >= lo && next <= hi)) break;
    const std::optional<double> fn = f(next);
    if (!fn) break;
    x = next;
    fx = fn;
    if (std::abs(*fn) < best_abs) {
      best = next;
      best_abs = std::abs(*fn);
    } else {
      break;
    }
  }
  return best;
}

struct QuadraticRoots {
  int count = 0;        // 0, 1 or 2 real roots
  double root[2] = {0.0, 0.0};  // ascending
  double discriminant = 0.0;
};

/// Real roots of a x^2 + b x + c using the cancellation-free form.
inline QuadraticRoots solve_quadratic(double a, double b, double c) {
  QuadraticRoots r;
  if (a == 0.0) {
    if (b != 0.0) {
      r.count = 1;
      r.root[0] = -c / b;
    }
    return r;
  }
  r.discriminant = b * b - 4.0 * a * c;
  if (r.discriminant < 0.0) return r;
  const double sq = std::sqrt(r.discriminant);
  const double q = -0.5 * (b + std::copysign(sq, b));
  double x1 = q / a;
  double x2 = (q != 0.0) ? c / q : x1;
  if (x1 > x2) std::swap(x1, x2);
  r.count = 2;
  r.root[0] = x1;
  r.root[1] = x2;
  return r;
}

}  // namespace polybill::roots
