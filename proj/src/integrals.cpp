#include "polybill/integrals.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>

namespace polybill {

namespace {

// shortest round-trip form
std::string num(double x) {
  if (x == 0.0) x = 0.0;  // no "-0"
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void need_dim(const Vec& x, const Vec& v, Eigen::Index n, const char* what) {
  if (x.size() != n || v.size() != n)
    throw Error(ErrorKind::DimensionMismatch, std::string(what) + " needs a " + std::to_string(n) + "-d state");
}

}  // namespace

std::string integral_id(const IntegralSpec& spec) {
  return std::visit(
      [](const auto& s) -> std::string {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, LinearMomentum>) {
          std::string out = "linear_momentum(" + std::to_string(s.a.dim());
          for (double x : s.a.upper()) out += "," + num(x);
          for (Eigen::Index i = 0; i < s.b.size(); ++i) out += "," + num(s.b[i]);
          return out + ")";
        } else if constexpr (std::is_same_v<S, PlanarDeg1>) {
          return "planar_deg1(" + num(s.a) + "," + num(s.b) + ")";
        } else if constexpr (std::is_same_v<S, ParabolaIntegral>) {
          return "parabola(" + num(s.lambda) + ")";
        } else if constexpr (std::is_same_v<S, ConicIntegral>) {
          return "conic(" + num(s.lambda) + ")";
        } else if constexpr (std::is_same_v<S, AxialDeg1>) {
          return "axial(" + num(s.alpha) + "," + num(s.beta) + ")";
        } else {
          return "degree2(" + num(s.a) + "," + num(s.b) + "," + num(s.c) + ")";
        }
      },
      spec);
}

double eval_integral(const IntegralSpec& spec, const Vec& x, const Vec& v) {
  return std::visit(
      [&](const auto& s) -> double {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, LinearMomentum>) {
          const int n = s.a.dim();
          need_dim(x, v, n, "linear momentum");
          if (s.b.size() != n) throw Error(ErrorKind::DimensionMismatch, "linear momentum: b has wrong size");
          double f = s.b.dot(v);
          for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) f += s.a(i, j) * (v[j] * x[i] - v[i] * x[j]);
          return f;
        } else if constexpr (std::is_same_v<S, PlanarDeg1>) {
          need_dim(x, v, 2, "planar integral");
          return x[0] * v[1] - x[1] * v[0] + s.a * v[0] + s.b * v[1];
        } else if constexpr (std::is_same_v<S, ParabolaIntegral>) {
          need_dim(x, v, 2, "parabola integral");
          const double m = x[0] * v[1] - x[1] * v[0];
          return m * v[1] + s.lambda * v[0] * v[0];
        } else if constexpr (std::is_same_v<S, ConicIntegral>) {
          need_dim(x, v, 2, "conic integral");
          const double m = x[0] * v[1] - x[1] * v[0];
          return m * m + s.lambda * v[0] * v[0];
        } else if constexpr (std::is_same_v<S, AxialDeg1>) {
          need_dim(x, v, 3, "axial integral");
          return s.alpha * (x[0] * v[1] - x[1] * v[0]) + s.beta * v[2];
        } else {
          need_dim(x, v, 3, "degree-two integral");
          const Vec3 m = axial_momenta(x, v);
          return s.a * (m[0] * m[0] + m[1] * m[1]) + s.b * (m[0] * v[1] - m[1] * v[0]) +
                 s.c * (v[0] * v[0] + v[1] * v[1]);
        }
      },
      spec);
}

Mat angular_momenta(const Vec& x, const Vec& v) {
  if (x.size() != v.size()) throw Error(ErrorKind::DimensionMismatch, "x and v differ in size");
  const auto n = x.size();
  Mat m = Mat::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      m(i, j) = v[j] * x[i] - v[i] * x[j];
      m(j, i) = -m(i, j);
    }
  return m;
}

Vec3 axial_momenta(const Vec3& x, const Vec3& v) {
  return Vec3(x[1] * v[2] - x[2] * v[1], x[2] * v[0] - x[0] * v[2], x[0] * v[1] - x[1] * v[0]);
}

std::vector<ConservationReport> audit_orbit(const Orbit& orbit, const std::vector<IntegralSpec>& specs) {
  std::vector<ConservationReport> reports;
  for (const auto& spec : specs) {
    ConservationReport r;
    r.integral = integral_id(spec);
    if (orbit.states.empty()) {
      reports.push_back(std::move(r));
      continue;
    }
    r.n_impacts = orbit.n_impacts();
    r.f0 = eval_integral(spec, orbit.states.front());
    r.series.reserve(1 + 3 * r.n_impacts);
    r.series.push_back(r.f0);
    for (std::size_t k = 1; k < orbit.states.size(); ++k) {
      const auto& prev = orbit.states[k - 1];
      const auto& cur = orbit.states[k];
      const Vec mid = 0.5 * (prev.x + cur.x);
      r.series.push_back(eval_integral(spec, mid, prev.v));
      r.series.push_back(eval_integral(spec, cur.x, prev.v));
      r.series.push_back(eval_integral(spec, cur.x, cur.v));
    }
    const double denom = std::max(std::abs(r.f0), 1e-3);
    for (double f : r.series) {
      const double d = std::abs(f - r.f0);
      r.max_abs_drift = std::max(r.max_abs_drift, d);
      r.max_rel_drift = std::max(r.max_rel_drift, d / denom);
    }
    reports.push_back(std::move(r));
  }
  return reports;
}

double wire_chord_integral(const WireTable& table, const WireChord& chord, const IntegralSpec& spec, bool at_end) {
  const PhaseState s = chord_state(table, chord);
  if (!at_end) return eval_integral(spec, s);
  return eval_integral(spec, table.curve().eval(chord.t), s.v);
}

IntegralSpec wire_integral(const WireTable& table) {
  const LinearSystem sys = table.linear_system();
  if (sys.b.isZero(0.0)) return LinearMomentum{sys.a, sys.b};
  return LinearMomentum{sys.a.transposed(), sys.b};
}

std::vector<IntegralSpec> natural_integrals(const Table& table) {
  return std::visit(
      [](const auto& t) -> std::vector<IntegralSpec> {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, PlanarTable>) {
          if (const auto* c = std::get_if<Circle>(&t.kind())) return {PlanarDeg1{c->center[1], -c->center[0]}};
          if (const auto* k = std::get_if<CentralConic>(&t.kind())) return {ConicIntegral{k->lambda}};
          return {ParabolaIntegral{std::get<Parabola>(t.kind()).lambda}};
        } else if constexpr (std::is_same_v<T, WireTable>) {
          return {wire_integral(t)};
        } else if constexpr (std::is_same_v<T, ArctanSurface>) {
          return {AxialDeg1{t.alpha(), t.beta()}};
        } else {
          if (const auto* lens = std::get_if<ParabolicLens>(&t.kind()))
            return {AxialDeg1{1.0, 0.0}, Degree2Axial{0.0, lens->b, lens->c}};
          const auto& tt = std::get<TetragonTorus>(t.kind());
          return {AxialDeg1{1.0, 0.0}, Degree2Axial{tt.a, tt.b, tt.c}};
        }
      },
      table);
}

AxialMultipliers axial_multipliers(double alpha, const Vec3& r, const Partials& p) {
  const Vec3& a = p.r_u1;
  const Vec3& b = p.r_u2;
  const double h1 = alpha * (r[0] * b[0] + r[1] * b[1]) / (b[0] * a[1] - a[0] * b[1]);
  const double h2 = alpha * (r[0] * a[0] + r[1] * a[1]) / (a[0] * b[1] - b[0] * a[1]);
  return {h1, h2};
}

double axial_identity_residual(const ArctanSurface& surface, const Vec2& u, const Vec3& v) {
  const SurfacePatch patch = surface.patch();
  const Vec3 r = patch.eval(u);
  const Partials p = patch.partials(u);
  const AxialMultipliers h = axial_multipliers(surface.alpha(), r, p);
  const TangentialData s = tangential_data(p, v);
  const double f = surface.alpha() * (r[0] * v[1] - r[1] * v[0]) + surface.beta() * v[2];
  return f - (h.h1 * s.s1 + h.h2 * s.s2);
}

ProfileMultipliers profile_multipliers(const ProfileFamily& family, double t, int branch) {
  const ProfileValue pv = profile_eval(family, t, branch);
  const double a = family.a(), b = family.b(), c = family.c();
  const double h11 = (b - 2.0 * a * pv.f) / (4.0 * pv.fp);
  ProfileMultipliers m{};
  m.h11 = h11;
  m.h12 = 0.0;
  m.h22 = h11;
  m.h = a * t - 4.0 * h11 * t * pv.fp * pv.fp;
  m.h_printed = a * t - 4.0 * h11 * t * pv.fp;
  const double lhs = h11 * (1.0 - 4.0 * pv.fp * pv.fp * t);
  m.constraint_printed = lhs - ((a - b) * pv.f + (c - a * t));
  m.constraint = lhs - (a * pv.f * pv.f - b * pv.f + c - a * t);
  return m;
}

ProfileIdentityCheck profile_identity_check(const ProfileFamily& family, int branch, const Vec2& u, const Vec3& v) {
  const double t = u.squaredNorm();
  const ProfileValue pv = profile_eval(family, t, branch);
  const ProfileMultipliers m = profile_multipliers(family, t, branch);
  const Vec3 r(u[0], u[1], pv.f);
  const Partials p{Vec3(1.0, 0.0, 2.0 * u[0] * pv.fp), Vec3(0.0, 1.0, 2.0 * u[1] * pv.fp)};
  const TangentialData s = tangential_data(p, v);
  const double f2 = eval_integral(Degree2Axial{family.a(), family.b(), family.c()}, r, v);
  const double quad = m.h11 * s.s1 * s.s1 + m.h12 * s.s1 * s.s2 + m.h22 * s.s2 * s.s2;
  const double vv = v.squaredNorm();
  ProfileIdentityCheck out{};
  out.residual = f2 - (quad + m.h * vv);
  out.printed_residual = f2 - (quad + m.h_printed * vv);
  out.printed_constraint = m.constraint_printed;
  out.printed_form_warning = std::abs(out.printed_residual) > 1e-9 || std::abs(out.printed_constraint) > 1e-9;
  return out;
}

}  // namespace polybill
