#include "polybill/tables.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "polybill/roots.hpp"

namespace polybill {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Vec make_vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

}  // namespace

// --- PlanarTable -----------------------------------------------------------------

PlanarTable::PlanarTable(Kind kind, Curve curve, std::array<double, 5> quadric)
    : kind_(kind), curve_(std::move(curve)), q_(quadric) {}

PlanarTable PlanarTable::circle(const Vec2& center, double radius) {
  if (!(radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "circle radius must be positive");
  const double cx = center[0], cy = center[1];
  Curve curve(
      2, [=](double t) { return make_vec({cx + radius * std::cos(t), cy + radius * std::sin(t)}); },
      [=](double t) { return make_vec({-radius * std::sin(t), radius * std::cos(t)}); }, Interval{}, kTwoPi);
  return PlanarTable(Circle{center, radius}, std::move(curve),
                     {1.0, 1.0, -2.0 * cx, -2.0 * cy, cx * cx + cy * cy - radius * radius});
}

PlanarTable PlanarTable::circle_for_integral(double a, double b, double radius) {
  return circle(Vec2(-b, a), radius);
}

PlanarTable PlanarTable::conic(double a2, double lambda) {
  if (!(a2 > 0.0)) throw Error(ErrorKind::InvalidArgument, "conic needs a^2 > 0");
  const double b2 = a2 - lambda;
  if (b2 == 0.0) throw Error(ErrorKind::InvalidArgument, "conic degenerates for lambda = a^2");
  const double sa = std::sqrt(a2), sb = std::sqrt(std::abs(b2));
  if (b2 > 0.0) {
    Curve curve(
        2, [=](double t) { return make_vec({sa * std::cos(t), sb * std::sin(t)}); },
        [=](double t) { return make_vec({-sa * std::sin(t), sb * std::cos(t)}); }, Interval{}, kTwoPi);
    return PlanarTable(CentralConic{a2, lambda}, std::move(curve), {1.0 / a2, 1.0 / b2, 0.0, 0.0, -1.0});
  }
  Curve curve(
      2, [=](double t) { return make_vec({sa * std::cosh(t), sb * std::sinh(t)}); },
      [=](double t) { return make_vec({sa * std::sinh(t), sb * std::cosh(t)}); });
  return PlanarTable(CentralConic{a2, lambda}, std::move(curve), {-1.0 / a2, -1.0 / b2, 0.0, 0.0, 1.0});
}

PlanarTable PlanarTable::parabola(double p, double lambda) {
  if (p == 0.0) throw Error(ErrorKind::InvalidArgument, "parabola needs p != 0");
  Curve curve(
      2, [=](double t) { return make_vec({(t * t - p * p + 2.0 * p * lambda) / (2.0 * p), t}); },
      [=](double t) { return make_vec({t / p, 1.0}); });
  return PlanarTable(Parabola{p, lambda}, std::move(curve), {0.0, 1.0, -2.0 * p, 0.0, -p * p + 2.0 * p * lambda});
}

std::string PlanarTable::name() const {
  if (std::holds_alternative<Circle>(kind_)) return "circle";
  if (std::holds_alternative<Parabola>(kind_)) return "parabola";
  return is_hyperbola() ? "hyperbola" : "ellipse";
}

bool PlanarTable::is_bounded() const {
  if (std::holds_alternative<Circle>(kind_)) return true;
  if (const auto* c = std::get_if<CentralConic>(&kind_)) return c->a2 > c->lambda;
  return false;
}

bool PlanarTable::is_hyperbola() const {
  const auto* c = std::get_if<CentralConic>(&kind_);
  return c && c->a2 < c->lambda;
}

double PlanarTable::implicit(const Vec2& x) const {
  return q_[0] * x[0] * x[0] + q_[1] * x[1] * x[1] + q_[2] * x[0] + q_[3] * x[1] + q_[4];
}

Vec2 PlanarTable::gradient(const Vec2& x) const {
  return Vec2(2.0 * q_[0] * x[0] + q_[2], 2.0 * q_[1] * x[1] + q_[3]);
}

std::array<double, 3> PlanarTable::ray_quadratic(const Vec2& x, const Vec2& v) const {
  return {q_[0] * v[0] * v[0] + q_[1] * v[1] * v[1],
          2.0 * q_[0] * x[0] * v[0] + 2.0 * q_[1] * x[1] * v[1] + q_[2] * v[0] + q_[3] * v[1], implicit(x)};
}

bool PlanarTable::on_table_branch(const Vec2& x) const { return !is_hyperbola() || x[0] > 0.0; }

bool PlanarTable::contains(const Vec2& x, double tol) const { return on_table_branch(x) && implicit(x) <= tol; }

Vec2 PlanarTable::inward_normal(const Vec2& x) const {
  const Vec2 g = gradient(x);
  const double norm = g.norm();
  if (!(norm > 0.0)) throw Error(ErrorKind::DegenerateNormal, "vanishing gradient on planar table");
  return -g / norm;
}

double PlanarTable::param_of(const Vec2& x) const {
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Circle>) {
          return std::atan2(x[1] - k.center[1], x[0] - k.center[0]);
        } else if constexpr (std::is_same_v<K, CentralConic>) {
          const double b2 = k.a2 - k.lambda;
          if (b2 > 0.0) return std::atan2(x[1] / std::sqrt(b2), x[0] / std::sqrt(k.a2));
          return std::asinh(x[1] / std::sqrt(-b2));
        } else {
          return x[1];
        }
      },
      kind_);
}

double PlanarTable::identity_residual(double t) const {
  const Vec g = curve_.eval(t);
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Circle>) {
          // (g1 + b)^2 + (g2 - a)^2 = R^2 with centre (-b, a)
          const double dx = g[0] - k.center[0], dy = g[1] - k.center[1];
          return dx * dx + dy * dy - k.radius * k.radius;
        } else if constexpr (std::is_same_v<K, CentralConic>) {
          return g[0] * g[0] / k.a2 + g[1] * g[1] / (k.a2 - k.lambda) - 1.0;
        } else {
          return k.p * k.p - 2.0 * k.p * k.lambda + 2.0 * k.p * g[0] - g[1] * g[1];
        }
      },
      kind_);
}

// --- WireTable ---------------------------------------------------------------------

std::optional<double> detect_period(const SkewMatrix& a, const Vec& gamma0) {
  const Mat dense = a.dense();
  Eigen::SelfAdjointEigenSolver<Mat> eig(dense.transpose() * dense);
  std::vector<double> candidates;
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
    const double w2 = eig.eigenvalues()[i];
    if (w2 <= 1e-24) continue;
    const double w = std::sqrt(w2);
    for (int j = 1; j <= 24; ++j) candidates.push_back(kTwoPi * j / w);
  }
  std::sort(candidates.begin(), candidates.end());
  const double scale = std::max(1.0, gamma0.norm());
  for (double p : candidates) {
    if ((matrix_exp_action(a, p, gamma0) - gamma0).norm() <= 1e-10 * scale) return p;
  }
  return std::nullopt;
}

WireTable WireTable::exp_wire(const SkewMatrix& a, const Vec& gamma0, std::optional<double> period) {
  if (gamma0.size() != a.dim()) throw Error(ErrorKind::DimensionMismatch, "gamma0 size does not match A");
  if (!(a.apply(gamma0).norm() > 1e-12))
    throw Error(ErrorKind::DegenerateTangent, "A gamma0 = 0: the wire is a single point");
  if (!period) period = detect_period(a, gamma0);
  Curve curve(
      a.dim(), [a, gamma0](double t) { return matrix_exp_action(a, t, gamma0); },
      [a, gamma0](double t) { return a.apply(matrix_exp_action(a, t, gamma0)); }, Interval{}, period);
  return WireTable(ExpWire{a, gamma0}, std::move(curve));
}

WireTable WireTable::spiral(double radius, double pitch) {
  if (!(radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "spiral radius must be positive");
  std::optional<double> period;
  if (pitch == 0.0) period = kTwoPi;
  Curve curve(
      3, [=](double t) { return make_vec({radius * std::sin(t), radius * std::cos(t), pitch * t}); },
      [=](double t) { return make_vec({radius * std::cos(t), -radius * std::sin(t), pitch}); }, Interval{}, period);
  return WireTable(Spiral{radius, pitch}, std::move(curve));
}

WireTable WireTable::toric_knot(double a, double b, int k, int m) {
  if (!(a > 0.0 && b > 0.0)) throw Error(ErrorKind::InvalidArgument, "toric knot radii must be positive");
  if (k < 1 || m < 1) throw Error(ErrorKind::InvalidArgument, "toric knot winding numbers must be >= 1");
  const double kk = k, mm = m;
  Curve curve(
      4,
      [=](double t) {
        return make_vec({a * std::cos(kk * t), a * std::sin(kk * t), b * std::cos(mm * t), b * std::sin(mm * t)});
      },
      [=](double t) {
        return make_vec({-a * kk * std::sin(kk * t), a * kk * std::cos(kk * t), -b * mm * std::sin(mm * t),
                         b * mm * std::cos(mm * t)});
      },
      Interval{}, kTwoPi / std::gcd(k, m));
  return WireTable(ToricKnot{a, b, k, m}, std::move(curve));
}

std::string WireTable::name() const {
  if (std::holds_alternative<ExpWire>(kind_)) return "exp_wire";
  if (std::holds_alternative<Spiral>(kind_)) return "spiral";
  return "toric_knot";
}

LinearSystem WireTable::linear_system() const {
  return std::visit(
      [&](const auto& k) -> LinearSystem {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, ExpWire>) {
          return {k.a, Vec::Zero(k.a.dim())};
        } else if constexpr (std::is_same_v<K, Spiral>) {
          SkewMatrix a(3);
          a.set(0, 1, 1.0);
          return {a, make_vec({0.0, 0.0, k.pitch})};
        } else {
          return {SkewMatrix::rotation_blocks({double(k.k), double(k.m)}), Vec::Zero(4)};
        }
      },
      kind_);
}

double WireTable::identity_residual(double t) const {
  const Vec g = curve_.eval(t);
  const Vec d = curve_.deriv(t);
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, ExpWire>) {
          return (d - k.a.apply(g)).norm();
        } else if constexpr (std::is_same_v<K, Spiral>) {
          // gamma_2 - h gamma_1' = 0, gamma_1 + h gamma_2' = 0, a - h gamma_3' = 0 with h = 1
          return make_vec({g[1] - d[0], g[0] + d[1], k.pitch - d[2]}).norm();
        } else {
          return std::max(std::abs(std::hypot(g[0], g[1]) - k.a), std::abs(std::hypot(g[2], g[3]) - k.b));
        }
      },
      kind_);
}

// --- profiles ------------------------------------------------------------------------

ProfileFamily ProfileFamily::make(double a, double b, double c, double s) {
  if (a == 0.0) {
    if (s == 0.0 || b == 0.0) throw Error(ErrorKind::InvalidArgument, "linear profile family needs s != 0, b != 0");
    return ProfileFamily(Kind::Linear, a, b, c, s, 0.0);
  }
  const double den = 4.0 * a * a * s - b * b + 4.0 * a * c;
  if (den == 0.0) throw Error(ErrorKind::InvalidArgument, "conic profile family needs 4a^2 s - b^2 + 4ac != 0");
  return ProfileFamily(Kind::Conic, a, b, c, s, 4.0 * a * a * s / den);
}

double ProfileFamily::conic_center() const { return a_ == 0.0 ? 0.0 : b_ / (2.0 * a_); }

ProfileValue profile_eval(const ProfileFamily& family, double t, int branch) {
  const double s = family.s();
  if (family.kind() == ProfileFamily::Kind::Linear) {
    const double b = family.b(), c = family.c();
    return {s * t + (4.0 * s * c - b) / (4.0 * s * b), s};
  }
  const double radicand = s - family.curvature() * t;
  if (radicand < 0.0)
    throw Error(ErrorKind::OutOfDomain, "conic profile radicand s - A t < 0 at t = " + std::to_string(t));
  const double sigma = branch < 0 ? -1.0 : 1.0;
  const double root = std::sqrt(radicand);
  double fp = 0.0;
  if (family.curvature() != 0.0)
    fp = root > 0.0 ? -sigma * family.curvature() / (2.0 * root)
                    : -sigma * std::copysign(std::numeric_limits<double>::infinity(), family.curvature());
  return {family.conic_center() + sigma * root, fp};
}

ScalarProfile ScalarProfile::linear(double slope, double offset) {
  return {[=](double t) { return slope * t + offset; }, [=](double) { return slope; }};
}

ScalarProfile ScalarProfile::from_family(const ProfileFamily& family, int branch) {
  return {[=](double t) { return profile_eval(family, t, branch).f; },
          [=](double t) { return profile_eval(family, t, branch).fp; }};
}

// --- ArctanSurface -----------------------------------------------------------------------

ArctanSurface::ArctanSurface(double alpha, double beta, ScalarProfile profile, Chart chart, int domain_side)
    : alpha_(alpha), beta_(beta), profile_(std::move(profile)), chart_(chart), side_(domain_side) {
  if (alpha_ == 0.0) throw Error(ErrorKind::InvalidArgument, "arctan surface needs alpha != 0");
  if (side_ != 1 && side_ != -1) throw Error(ErrorKind::InvalidArgument, "domain side must be +1 or -1");
}

bool ArctanSurface::in_chart(const Vec2& u) const {
  if (chart_ == Chart::HalfPlane) return u[1] > 0.0;
  return !(u[0] == 0.0 && u[1] <= 0.0);
}

double ArctanSurface::height(const Vec2& u) const {
  return -(beta_ / alpha_) * std::atan2(u[0], u[1]) + profile_.f(u.squaredNorm());
}

Vec2 ArctanSurface::height_gradient(const Vec2& u) const {
  const double t = u.squaredNorm();
  const double k = beta_ / alpha_;
  const double fp = profile_.fp(t);
  return Vec2(-k * u[1] / t + 2.0 * u[0] * fp, k * u[0] / t + 2.0 * u[1] * fp);
}

SurfacePatch ArctanSurface::patch() const {
  const ArctanSurface self = *this;
  return SurfacePatch::graph([self](const Vec2& u) { return self.height(u); },
                             [self](const Vec2& u) { return self.height_gradient(u); },
                             [self](const Vec2& u) { return self.in_chart(u); });
}

double ArctanSurface::implicit(const Vec3& p) const {
  return -side_ * (p[2] - height(Vec2(p[0], p[1])));
}

Vec3 ArctanSurface::implicit_gradient(const Vec3& p) const {
  const Vec2 g = height_gradient(Vec2(p[0], p[1]));
  return -side_ * Vec3(-g[0], -g[1], 1.0);
}

// --- quadrics of revolution and piecewise tables ---------------------------------------

double QuadricOfRevolution::value(const Vec3& p) const {
  const double z = p[2] - z0;
  return rr * (p[0] * p[0] + p[1] * p[1]) + zz * z * z + z1 * z + c0;
}

Vec3 QuadricOfRevolution::gradient(const Vec3& p) const {
  const double z = p[2] - z0;
  return Vec3(2.0 * rr * p[0], 2.0 * rr * p[1], 2.0 * zz * z + z1);
}

std::array<double, 3> QuadricOfRevolution::ray_quadratic(const Vec3& p, const Vec3& v) const {
  const double z = p[2] - z0;
  return {rr * (v[0] * v[0] + v[1] * v[1]) + zz * v[2] * v[2],
          2.0 * rr * (p[0] * v[0] + p[1] * v[1]) + 2.0 * zz * z * v[2] + z1 * v[2], value(p)};
}

std::string PiecewiseSurfaceTable::name() const {
  return std::holds_alternative<ParabolicLens>(kind_) ? "parabolic_lens" : "tetragon_torus";
}

bool PiecewiseSurfaceTable::in_halfspace(const Vec3& p, double tol) const {
  if (const auto* t = std::get_if<TetragonTorus>(&kind_)) return p[2] - t->b / (2.0 * t->a) >= -tol;
  return true;
}

bool PiecewiseSurfaceTable::contains(const Vec3& p, double tol) const {
  if (!in_halfspace(p, tol)) return false;
  return std::all_of(pieces_.begin(), pieces_.end(),
                     [&](const SurfacePiece& piece) { return piece.quadric.value(p) <= tol; });
}

std::optional<double> PiecewiseSurfaceTable::edge_distance(int piece, const Vec3& p, double tol) const {
  if (!in_halfspace(p, tol)) return std::nullopt;
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < static_cast<int>(pieces_.size()); ++j) {
    if (j == piece) continue;
    const auto& q = pieces_[j].quadric;
    const double phi = q.value(p);
    if (phi > tol) return std::nullopt;
    const double g = q.gradient(p).norm();
    best = std::min(best, g > 0.0 ? std::abs(phi) / g : std::abs(phi));
  }
  return best;
}

Vec3 PiecewiseSurfaceTable::inward_normal(int piece, const Vec3& p) const {
  const Vec3 g = pieces_.at(piece).quadric.gradient(p);
  const double norm = g.norm();
  if (!(norm > 0.0)) throw Error(ErrorKind::DegenerateNormal, "vanishing gradient on " + pieces_[piece].name);
  return -g / norm;
}

Partials PiecewiseSurfaceTable::partials(int piece, const Vec3& p) const {
  const auto& pc = pieces_.at(piece);
  const double fp = profile_eval(pc.profile, p[0] * p[0] + p[1] * p[1], pc.branch).fp;
  return {Vec3(1.0, 0.0, 2.0 * p[0] * fp), Vec3(0.0, 1.0, 2.0 * p[1] * fp)};
}

SurfacePatch PiecewiseSurfaceTable::patch(int piece) const {
  const SurfacePiece pc = pieces_.at(piece);
  const PiecewiseSurfaceTable self = *this;
  return SurfacePatch::graph(
      [pc](const Vec2& u) { return profile_eval(pc.profile, u.squaredNorm(), pc.branch).f; },
      [pc](const Vec2& u) { return Vec2(2.0 * profile_eval(pc.profile, u.squaredNorm(), pc.branch).fp * u); },
      [pc, self, piece](const Vec2& u) {
        const double t = u.squaredNorm();
        if (pc.profile.kind() == ProfileFamily::Kind::Conic && pc.profile.s() - pc.profile.curvature() * t <= 0.0)
          return false;
        const Vec3 p(u[0], u[1], profile_eval(pc.profile, t, pc.branch).f);
        return self.edge_distance(piece, p, 1e-9).has_value();
      });
}

PiecewiseSurfaceTable make_parabolic_lens(double b, double c, double s1, double s2) {
  if (b == 0.0) throw Error(ErrorKind::InvalidArgument, "parabolic lens needs b != 0");
  if (!(s1 > 0.0 && s2 < 0.0))
    throw Error(ErrorKind::EmptyRegion, "paraboloids with s1 = " + std::to_string(s1) + ", s2 = " +
                                            std::to_string(s2) + " bound no solid (need s1 > 0 > s2)");
  const double k1 = (4.0 * s1 * c - b) / (4.0 * s1 * b);
  const double k2 = (4.0 * s2 * c - b) / (4.0 * s2 * b);
  if (!(k1 < k2)) throw Error(ErrorKind::EmptyRegion, "lower apex is not below the upper apex");

  std::vector<SurfacePiece> pieces;
  // z >= s1 R^2 + k1 and z <= s2 R^2 + k2
  pieces.push_back({"lower", QuadricOfRevolution{s1, 0.0, -1.0, k1, 0.0}, ProfileFamily::make(0.0, b, c, s1), 1});
  pieces.push_back({"upper", QuadricOfRevolution{-s2, 0.0, 1.0, -k2, 0.0}, ProfileFamily::make(0.0, b, c, s2), 1});
  const double r2 = (k2 - k1) / (s1 - s2);
  std::vector<EdgeCircle> edges{{std::sqrt(r2), s1 * r2 + k1, 0, 1}};
  return PiecewiseSurfaceTable(ParabolicLens{b, c, s1, s2}, std::move(pieces), std::move(edges));
}

PiecewiseSurfaceTable make_tetragon_torus(double a, double b, double c, double s_e1, double s_e2, double s_h1,
                                          double s_h2) {
  if (a == 0.0) throw Error(ErrorKind::InvalidArgument, "tetragon torus needs a != 0");
  const double d = (4.0 * a * c - b * b) / (4.0 * a * a);
  if (!(d > 0.0)) throw Error(ErrorKind::EmptyRegion, "confocal family needs (4ac - b^2)/(4a^2) > 0");
  if (!(s_e1 > 0.0 && s_e2 > s_e1))
    throw Error(ErrorKind::EmptyRegion, "ellipse parameters must satisfy s_e2 > s_e1 > 0");
  if (s_h1 == s_h2) throw Error(ErrorKind::EmptyRegion, "hyperbola parameters coincide");
  for (double s : {s_h1, s_h2}) {
    if (s >= 0.0) throw Error(ErrorKind::EmptyRegion, "hyperbola parameter must be negative");
    if (s <= -d) throw Error(ErrorKind::AxisTouching, "hyperbola parameter <= -D reaches the rotation axis");
  }
  const double z0 = b / (2.0 * a);
  const double h_lo = std::min(s_h1, s_h2);

  // G_s = Z^2/s + R^2/(s + D) - 1 decreases in s; the region is
  // s_e1 < s_e < s_e2 and h_lo < s_h < h_hi.
  auto conic = [&](double s, double orient) {
    return QuadricOfRevolution{orient / (s + d), orient / s, 0.0, -orient, z0};
  };
  std::vector<SurfacePiece> pieces;
  pieces.push_back({"ellipse_1", conic(s_e1, -1.0), ProfileFamily::make(a, b, c, s_e1), 1});
  pieces.push_back({"ellipse_2", conic(s_e2, 1.0), ProfileFamily::make(a, b, c, s_e2), 1});
  pieces.push_back({"hyperbola_1", conic(s_h1, s_h1 == h_lo ? -1.0 : 1.0), ProfileFamily::make(a, b, c, s_h1), 1});
  pieces.push_back({"hyperbola_2", conic(s_h2, s_h2 == h_lo ? -1.0 : 1.0), ProfileFamily::make(a, b, c, s_h2), 1});

  std::vector<EdgeCircle> edges;
  for (int e = 0; e < 2; ++e)
    for (int h = 2; h < 4; ++h) {
      const double se = e == 0 ? s_e1 : s_e2;
      const double sh = h == 2 ? s_h1 : s_h2;
      const double r2 = (se + d) * (sh + d) / d;
      const double z2 = -se * sh / d;
      edges.push_back({std::sqrt(r2), z0 + std::sqrt(z2), e, h});
    }
  return PiecewiseSurfaceTable(TetragonTorus{a, b, c, s_e1, s_e2, s_h1, s_h2, d}, std::move(pieces),
                               std::move(edges));
}

std::pair<double, double> confocal_coordinates(double radius, double z, double focal_shift) {
  const auto r = roots::solve_quadratic(1.0, focal_shift - z * z - radius * radius, -z * z * focal_shift);
  if (r.count < 2) return {0.0, 0.0};
  return {r.root[1], r.root[0]};
}

std::string table_name(const Table& table) {
  return std::visit([](const auto& t) -> std::string {
    using T = std::decay_t<decltype(t)>;
    if constexpr (std::is_same_v<T, ArctanSurface>) return "arctan_surface";
    else return t.name();
  }, table);
}

}  // namespace polybill
