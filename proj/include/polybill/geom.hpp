#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "polybill/error.hpp"

namespace polybill {

/// Points and velocities in R^n. Every catalog table works in n <= 6, so a
/// dynamic Eigen vector is enough and keeps the wire code dimension-generic.
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double t) const { return t >= lo && t <= hi; }
  bool bounded() const { return std::isfinite(lo) && std::isfinite(hi); }
};

/// A differentiable curve t -> R^n. Not assumed to be arc-length
/// parametrized; angle conditions go through unit_tangent().
class Curve {
 public:
  using Map = std::function<Vec(double)>;

  Curve(int dim, Map eval, Map deriv, Interval domain = {}, std::optional<double> period = {});

  int dim() const { return dim_; }
  Vec eval(double t) const { return eval_(t); }
  Vec deriv(double t) const { return deriv_(t); }
  const Interval& domain() const { return domain_; }
  std::optional<double> period() const { return period_; }

 private:
  int dim_;
  Map eval_;
  Map deriv_;
  Interval domain_;
  std::optional<double> period_;
};

struct Partials {
  Vec3 r_u1;
  Vec3 r_u2;
};

/// A parametrized surface patch r(u1, u2) in R^3.
class SurfacePatch {
 public:
  using EvalFn = std::function<Vec3(const Vec2&)>;
  using PartialsFn = std::function<Partials(const Vec2&)>;
  using DomainFn = std::function<bool(const Vec2&)>;

  SurfacePatch(EvalFn eval, PartialsFn partials, DomainFn in_domain, bool graph_chart = false);

  /// Graph chart r(u) = (u1, u2, height(u)).
  static SurfacePatch graph(std::function<double(const Vec2&)> height,
                            std::function<Vec2(const Vec2&)> height_gradient, DomainFn in_domain);

  Vec3 eval(const Vec2& u) const { return eval_(u); }
  Partials partials(const Vec2& u) const { return partials_(u); }
  bool in_domain(const Vec2& u) const { return in_domain_(u); }
  /// True when r^1 = u1 and r^2 = u2 by construction.
  bool is_graph_chart() const { return graph_chart_; }

 private:
  EvalFn eval_;
  PartialsFn partials_;
  DomainFn in_domain_;
  bool graph_chart_;
};

/// Element of so(n). Only the strict upper triangle is stored, so
/// A + A^T = 0 holds exactly.
class SkewMatrix {
 public:
  explicit SkewMatrix(int n);

  /// Row-major strict upper triangle: a12, a13, ..., a1n, a23, ...
  static SkewMatrix from_upper(int n, const std::vector<double>& upper);
  /// Throws InvalidArgument unless |A + A^T| <= tol entrywise.
  static SkewMatrix from_dense(const Mat& dense, double tol = 1e-14);
  /// block-diag(w_1 J, w_2 J, ...) with J = [[0, -1], [1, 0]].
  static SkewMatrix rotation_blocks(const std::vector<double>& frequencies);

  int dim() const { return n_; }
  double operator()(int i, int j) const;
  void set(int i, int j, double value);
  Mat dense() const;
  Vec apply(const Vec& x) const;
  SkewMatrix transposed() const;
  const std::vector<double>& upper() const { return upper_; }

 private:
  int index(int i, int j) const;

  int n_;
  std::vector<double> upper_;
};

/// Unit tangent deriv(t)/|deriv(t)|; DegenerateTangent when |deriv(t)| <= 1e-12.
Vec unit_tangent(const Curve& curve, double t);

/// exp(A t) as a dense orthogonal matrix.
Mat matrix_exp(const SkewMatrix& a, double t);

/// exp(A t) x0. Decoupled 2x2 blocks use the closed-form rotation, larger
/// blocks use scaling and squaring of the Taylor series.
Vec matrix_exp_action(const SkewMatrix& a, double t, const Vec& x0);

/// Unit normal r_u1 x r_u2 / |r_u1 x r_u2|; DegenerateNormal below 1e-12.
Vec3 surface_normal(const SurfacePatch& patch, const Vec2& u);

/// Reflection in the plane orthogonal to the unit vector n.
inline Vec reflect(const Vec& v, const Vec& n) { return v - 2.0 * v.dot(n) * n; }

}  // namespace polybill
