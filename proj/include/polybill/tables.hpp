#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "polybill/geom.hpp"

namespace polybill {

// --- planar tables ------------------------------------------------------------

struct Circle {
  Vec2 center;
  double radius;
};

/// x^2/a2 + y^2/(a2 - lambda) = 1: an ellipse when a2 > lambda, the right
/// branch of a hyperbola when a2 < lambda.
struct CentralConic {
  double a2;
  double lambda;
};

/// p^2 - 2 p lambda + 2 p x = y^2; the focus sits at (lambda, 0).
struct Parabola {
  double p;
  double lambda;
};

/// Boundary curve of a planar billiard together with the implicit quadric
/// Phi that is <= 0 on the table.
class PlanarTable {
 public:
  using Kind = std::variant<Circle, CentralConic, Parabola>;

  static PlanarTable circle(const Vec2& center, double radius);
  /// The circle (x + b)^2 + (y - a)^2 = R^2 carrying x v2 - y v1 + a v1 + b v2.
  static PlanarTable circle_for_integral(double a, double b, double radius);
  static PlanarTable conic(double a2, double lambda);
  static PlanarTable parabola(double p, double lambda);

  const Kind& kind() const { return kind_; }
  const Curve& curve() const { return curve_; }
  std::string name() const;

  bool is_bounded() const;
  bool is_hyperbola() const;

  double implicit(const Vec2& x) const;
  Vec2 gradient(const Vec2& x) const;
  /// Phi(x + lambda v) = q[0] lambda^2 + q[1] lambda + q[2].
  std::array<double, 3> ray_quadratic(const Vec2& x, const Vec2& v) const;
  /// Excludes the left branch of a hyperbola.
  bool on_table_branch(const Vec2& x) const;
  bool contains(const Vec2& x, double tol = 0.0) const;
  Vec2 inward_normal(const Vec2& x) const;
  double param_of(const Vec2& x) const;

  /// Residual of the defining identity at curve(t).
  double identity_residual(double t) const;

 private:
  PlanarTable(Kind kind, Curve curve, std::array<double, 5> quadric);

  Kind kind_;
  Curve curve_;
  // Phi = qxx x^2 + qyy y^2 + lx x + ly y + k
  std::array<double, 5> q_;
};

// --- wire tables --------------------------------------------------------------

struct ExpWire {
  SkewMatrix a;
  Vec gamma0;
};

/// (R sin t, R cos t, a t).
struct Spiral {
  double radius;
  double pitch;
};

/// (a e^{ikt}, b e^{imt}) in C^2 = R^4.
struct ToricKnot {
  double a;
  double b;
  int k;
  int m;
};

/// Affine system gamma' = A gamma + b.
struct LinearSystem {
  SkewMatrix a;
  Vec b;
};

class WireTable {
 public:
  using Kind = std::variant<ExpWire, Spiral, ToricKnot>;

  /// When no period is given it is detected from the rotation frequencies of A.
  static WireTable exp_wire(const SkewMatrix& a, const Vec& gamma0, std::optional<double> period = {});
  static WireTable spiral(double radius, double pitch);
  static WireTable toric_knot(double a, double b, int k, int m);

  const Kind& kind() const { return kind_; }
  const Curve& curve() const { return curve_; }
  int dim() const { return curve_.dim(); }
  std::string name() const;

  LinearSystem linear_system() const;
  double identity_residual(double t) const;

 private:
  WireTable(Kind kind, Curve curve) : kind_(std::move(kind)), curve_(std::move(curve)) {}

  Kind kind_;
  Curve curve_;
};

/// Smallest P > 0 with exp(A P) gamma0 = gamma0 among the candidates
/// 2 pi j / w built from the rotation frequencies w of A, if any.
std::optional<double> detect_period(const SkewMatrix& a, const Vec& gamma0);

// --- profile functions ----------------------------------------------------------

/// Solutions f(t) of the degree-two integrability ODE.
/// Linear (a = 0): f = s t + (4 s c - b)/(4 s b).
/// Conic (a != 0): (f - b/(2a))^2 + curvature t - s = 0,
///                 curvature = 4 a^2 s / (4 a^2 s - b^2 + 4 a c).
class ProfileFamily {
 public:
  enum class Kind { Linear, Conic };

  static ProfileFamily make(double a, double b, double c, double s);

  Kind kind() const { return kind_; }
  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }
  double s() const { return s_; }
  /// The conic coefficient (zero for the linear family).
  double curvature() const { return curvature_; }
  /// b/(2a): the z-centre of the conic family.
  double conic_center() const;

 private:
  ProfileFamily(Kind kind, double a, double b, double c, double s, double curvature)
      : kind_(kind), a_(a), b_(b), c_(c), s_(s), curvature_(curvature) {}

  Kind kind_;
  double a_, b_, c_, s_;
  double curvature_;
};

struct ProfileValue {
  double f;
  double fp;
};

/// Value and derivative of the profile at t. `branch` (+1/-1) picks the sign
/// of the square root on the conic family and is ignored on the linear one.
/// OutOfDomain when the radicand s - curvature t is negative.
ProfileValue profile_eval(const ProfileFamily& family, double t, int branch = 1);

/// f with derivative, used for graph surfaces z = f(x^2 + y^2).
struct ScalarProfile {
  std::function<double(double)> f;
  std::function<double(double)> fp;

  static ScalarProfile linear(double slope, double offset);
  static ScalarProfile from_family(const ProfileFamily& family, int branch = 1);
};

// --- surface tables --------------------------------------------------------------

/// r(u) = (u1, u2, -(beta/alpha) atan2(u1, u2) + f(u1^2 + u2^2)).
class ArctanSurface {
 public:
  enum class Chart {
    HalfPlane,  ///< u2 > 0, where atan2(u1, u2) = arctan(u1/u2)
    SlitPlane,  ///< plane minus the ray {u1 = 0, u2 <= 0}
  };

  /// `domain_side` = -1 puts the billiard region below the graph, +1 above.
  ArctanSurface(double alpha, double beta, ScalarProfile profile, Chart chart = Chart::HalfPlane,
                int domain_side = -1);

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  Chart chart() const { return chart_; }
  int domain_side() const { return side_; }
  const ScalarProfile& profile() const { return profile_; }

  bool in_chart(const Vec2& u) const;
  double height(const Vec2& u) const;
  Vec2 height_gradient(const Vec2& u) const;
  SurfacePatch patch() const;

  /// -side * (z - height): negative on the billiard side.
  double implicit(const Vec3& p) const;
  Vec3 implicit_gradient(const Vec3& p) const;

 private:
  double alpha_;
  double beta_;
  ScalarProfile profile_;
  Chart chart_;
  int side_;
};

/// Phi(p) = rr R^2 + zz Z^2 + z1 Z + c0 with R^2 = x^2 + y^2, Z = z - z0.
struct QuadricOfRevolution {
  double rr = 0.0;
  double zz = 0.0;
  double z1 = 0.0;
  double c0 = 0.0;
  double z0 = 0.0;

  double value(const Vec3& p) const;
  Vec3 gradient(const Vec3& p) const;
  std::array<double, 3> ray_quadratic(const Vec3& p, const Vec3& v) const;
};

/// One smooth piece z = f(x^2 + y^2) of a piecewise table. `quadric` is
/// oriented so that it is <= 0 on the billiard side.
struct SurfacePiece {
  std::string name;
  QuadricOfRevolution quadric;
  ProfileFamily profile;
  int branch;
};

/// Circle where two pieces meet, in the (R, z) half-plane.
struct EdgeCircle {
  double radius;
  double height;
  int piece_a;
  int piece_b;
};

struct ParabolicLens {
  double b, c, s1, s2;
};

struct TetragonTorus {
  double a, b, c;
  double s_e1, s_e2, s_h1, s_h2;
  double focal_shift;  ///< D = (4ac - b^2)/(4a^2)
};

class PiecewiseSurfaceTable {
 public:
  using Kind = std::variant<ParabolicLens, TetragonTorus>;

  const Kind& kind() const { return kind_; }
  const std::vector<SurfacePiece>& pieces() const { return pieces_; }
  const std::vector<EdgeCircle>& edges() const { return edges_; }
  std::string name() const;

  bool contains(const Vec3& p, double tol = 0.0) const;
  /// Distance to the nearest edge when p (a point of piece i) lies on the
  /// part of the piece that bounds the table, nullopt otherwise.
  std::optional<double> edge_distance(int piece, const Vec3& p, double tol = 1e-12) const;
  Vec3 inward_normal(int piece, const Vec3& p) const;
  /// Graph-chart partials (1, 0, 2x f'), (0, 1, 2y f') at a point of piece i.
  Partials partials(int piece, const Vec3& p) const;
  SurfacePatch patch(int piece) const;

  friend PiecewiseSurfaceTable make_parabolic_lens(double b, double c, double s1, double s2);
  friend PiecewiseSurfaceTable make_tetragon_torus(double a, double b, double c, double s_e1, double s_e2,
                                                   double s_h1, double s_h2);

 private:
  PiecewiseSurfaceTable(Kind kind, std::vector<SurfacePiece> pieces, std::vector<EdgeCircle> edges)
      : kind_(std::move(kind)), pieces_(std::move(pieces)), edges_(std::move(edges)) {}

  bool in_halfspace(const Vec3& p, double tol) const;

  Kind kind_;
  std::vector<SurfacePiece> pieces_;
  std::vector<EdgeCircle> edges_;
};

/// Two confocal paraboloids z = s R^2 + (4 s c - b)/(4 s b), s in {s1, s2},
/// s1 > 0 > s2, bounding a lens. EmptyRegion otherwise.
PiecewiseSurfaceTable make_parabolic_lens(double b, double c, double s1, double s2);

/// Solid torus from rotating the tetragon bounded by two confocal ellipses
/// (0 < s_e1 < s_e2) and two confocal hyperbolas (-D < s_h < 0) of the family
/// (z - b/(2a))^2/s + R^2/(s + D) = 1 in the upper half z > b/(2a).
PiecewiseSurfaceTable make_tetragon_torus(double a, double b, double c, double s_e1, double s_e2, double s_h1,
                                          double s_h2);

/// Confocal coordinates (s_ellipse, s_hyperbola) of a point (R, Z) for the
/// family Z^2/s + R^2/(s + D) = 1, D > 0.
std::pair<double, double> confocal_coordinates(double radius, double z, double focal_shift);

using Table = std::variant<PlanarTable, WireTable, ArctanSurface, PiecewiseSurfaceTable>;

std::string table_name(const Table& table);

}  // namespace polybill
