#include "polybill/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "polybill/roots.hpp"

namespace polybill {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_unit(const Vec& v) {
  if (!(std::abs(v.norm() - 1.0) <= 1e-12)) throw Error(ErrorKind::InvalidArgument, "velocity is not a unit vector");
}

struct Candidate {
  double lambda;
  int piece;
  double discriminant;
};

Termination termination_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NoIntersection: return Termination::NoIntersection;
    case ErrorKind::TangentialImpact: return Termination::TangentialImpact;
    case ErrorKind::EdgeImpact: return Termination::EdgeImpact;
    case ErrorKind::NoReflection: return Termination::NoReflection;
    case ErrorKind::AmbiguousBranch: return Termination::AmbiguousBranch;
    default: return Termination::InvalidState;
  }
}

}  // namespace

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::Completed: return "Completed";
    case Termination::NoIntersection: return "NoIntersection";
    case Termination::TangentialImpact: return "TangentialImpact";
    case Termination::EdgeImpact: return "EdgeImpact";
    case Termination::NoReflection: return "NoReflection";
    case Termination::AmbiguousBranch: return "AmbiguousBranch";
    case Termination::InvalidState: return "InvalidState";
  }
  return "Unknown";
}

// --- planar ------------------------------------------------------------------------

Impact planar_step(const PlanarTable& table, const PhaseState& state, const StepOptions& opts) {
  if (state.x.size() != 2 || state.v.size() != 2)
    throw Error(ErrorKind::DimensionMismatch, "planar step needs a 2-d state");
  check_unit(state.v);
  const Vec2 x = state.x, v = state.v;

  const auto q = table.ray_quadratic(x, v);
  const auto roots = roots::solve_quadratic(q[0], q[1], q[2]);
  std::optional<double> lambda;
  for (int i = 0; i < roots.count; ++i) {
    const double l = roots.root[i];
    if (l > opts.min_advance && table.on_table_branch(x + l * v)) {
      lambda = l;
      break;
    }
  }
  if (!lambda) throw Error(ErrorKind::NoIntersection, "ray leaves the " + table.name() + " table");

  auto phi = [&](double l) -> std::optional<double> { return table.implicit(x + l * v); };
  auto dphi = [&](double l) -> std::optional<double> { return table.gradient(x + l * v).dot(v); };
  const double slack = 1e-6 * *lambda + 1e-12;
  const double l = roots::newton_polish(phi, dphi, *lambda, *lambda - slack, *lambda + slack, opts.newton_iterations);

  const Vec2 hit = x + l * v;
  const Vec2 n = table.inward_normal(hit);
  if (std::abs(v.dot(n)) < opts.tangential_tol) throw Error(ErrorKind::TangentialImpact, "grazing impact");
  // renormalized, rounding in the reflection otherwise accumulates over 1e4 impacts
  const Vec2 out = (v - 2.0 * v.dot(n) * n).normalized();
  return {PhaseState{hit, out}, BoundaryParam{table.param_of(hit), std::numeric_limits<double>::quiet_NaN(), 0}, l};
}

// --- wire ----------------------------------------------------------------------------

namespace {

struct WireFrame {
  Vec end;     // gamma(t)
  Vec tangent; // unit tangent at t
  double incoming;
  double scale;
};

WireFrame wire_frame(const WireTable& table, const WireChord& chord) {
  const Curve& c = table.curve();
  const Vec start = c.eval(chord.s);
  const Vec end = c.eval(chord.t);
  const Vec d = end - start;
  const double len = d.norm();
  const double scale = std::max(1.0, end.norm());
  if (!(len > 1e-12 * scale)) throw Error(ErrorKind::InvalidArgument, "zero-length chord");
  const Vec tau = unit_tangent(c, chord.t);
  return {end, tau, d.dot(tau) / len, scale};
}

std::optional<double> gap(const Curve& c, const WireFrame& f, double sigma) {
  const Vec d = c.eval(sigma) - f.end;
  const double len = d.norm();
  if (!(len > 1e-9 * f.scale)) return std::nullopt;
  return d.dot(f.tangent) / len - f.incoming;
}

std::optional<double> gap_derivative(const Curve& c, const WireFrame& f, double sigma) {
  const Vec d = c.eval(sigma) - f.end;
  const double len = d.norm();
  if (!(len > 1e-9 * f.scale)) return std::nullopt;
  const Vec u = d / len;
  const Vec dg = c.deriv(sigma);
  return (dg.dot(f.tangent) - u.dot(f.tangent) * u.dot(dg)) / len;
}

std::vector<double> wire_roots(const Curve& c, const WireFrame& f, double lo, double hi, const StepOptions& opts) {
  auto g = [&](double s) { return gap(c, f, s); };
  auto dg = [&](double s) { return gap_derivative(c, f, s); };
  std::vector<double> out;
  for (const auto& b : roots::scan_brackets(g, lo, hi, opts.scan_intervals)) {
    double r = roots::bisect(g, b, opts.bisection_tol);
    r = roots::newton_polish(g, dg, r, b.lo, b.hi, opts.newton_iterations);
    const auto gr = g(r);
    if (gr && std::abs(*gr) <= 1e-9) out.push_back(r);
  }
  return out;
}

}  // namespace

std::optional<double> wire_reflection_gap(const WireTable& table, const WireChord& chord, double sigma) {
  return gap(table.curve(), wire_frame(table, chord), sigma);
}

WireChord wire_step(const WireTable& table, const WireChord& chord, BranchPolicy policy, const StepOptions& opts) {
  const Curve& c = table.curve();
  const WireFrame frame = wire_frame(table, chord);
  const auto period = c.period();
  const double window = opts.wire_window.value_or(period.value_or(2.0 * kTwoPi));
  // A full period window ends where the chord degenerates again.
  const double far = (period && window >= *period) ? window - opts.min_advance : window;
  const double t = chord.t;

  if (policy == BranchPolicy::Forward) {
    const auto roots = wire_roots(c, frame, t + opts.min_advance, t + far, opts);
    if (roots.empty()) throw Error(ErrorKind::NoReflection, "no equal-angle chord in the forward window");
    return {t, roots.front()};
  }

  std::vector<double> roots = wire_roots(c, frame, t - far, t - opts.min_advance, opts);
  const auto forward = wire_roots(c, frame, t + opts.min_advance, t + far, opts);
  roots.insert(roots.end(), forward.begin(), forward.end());
  auto same_point = [&](double a, double b) {
    if (period) {
      const double d = std::remainder(a - b, *period);
      return std::abs(d) < 1e-8;
    }
    return std::abs(a - b) < 1e-8;
  };
  std::erase_if(roots, [&](double r) { return same_point(r, chord.s); });
  if (roots.empty()) throw Error(ErrorKind::NoReflection, "no equal-angle chord in the window");
  std::sort(roots.begin(), roots.end(), [&](double a, double b) { return std::abs(a - t) < std::abs(b - t); });
  if (roots.size() > 1 && std::abs(std::abs(roots[1] - t) - std::abs(roots[0] - t)) <= 1e-12)
    throw Error(ErrorKind::AmbiguousBranch, "two equal-angle chords at the same parameter distance");
  return {t, roots.front()};
}

PhaseState chord_state(const WireTable& table, const WireChord& chord) {
  const Vec a = table.curve().eval(chord.s);
  const Vec d = table.curve().eval(chord.t) - a;
  const double len = d.norm();
  if (!(len > 0.0)) throw Error(ErrorKind::InvalidArgument, "zero-length chord");
  return {a, d / len};
}

// --- surfaces --------------------------------------------------------------------------

Impact surface_step(const ArctanSurface& table, const PhaseState& state, const StepOptions& opts) {
  if (state.x.size() != 3 || state.v.size() != 3)
    throw Error(ErrorKind::DimensionMismatch, "surface step needs a 3-d state");
  check_unit(state.v);
  const Vec3 x = state.x, v = state.v;
  if (!table.in_chart(Vec2(x[0], x[1]))) throw Error(ErrorKind::InvalidArgument, "start point outside the chart");
  if (table.implicit(x) > 1e-9) throw Error(ErrorKind::InvalidArgument, "start point on the wrong side of the surface");

  auto phi = [&](double l) -> std::optional<double> {
    const Vec3 p = x + l * v;
    if (!table.in_chart(Vec2(p[0], p[1]))) return std::nullopt;
    return table.implicit(p);
  };
  auto dphi = [&](double l) -> std::optional<double> {
    const Vec3 p = x + l * v;
    if (!table.in_chart(Vec2(p[0], p[1]))) return std::nullopt;
    return table.implicit_gradient(p).dot(v);
  };
  const auto brackets = roots::scan_brackets(phi, opts.min_advance, opts.surface_window, opts.scan_intervals);
  if (brackets.empty()) throw Error(ErrorKind::NoIntersection, "ray does not meet the arctan surface");
  const auto& b = brackets.front();
  double l = roots::bisect(phi, b, opts.bisection_tol);
  l = roots::newton_polish(phi, dphi, l, b.lo, b.hi, opts.newton_iterations);

  const Vec3 hit = x + l * v;
  const Vec3 g = table.implicit_gradient(hit);
  const Vec3 n = -g / g.norm();
  if (std::abs(v.dot(n)) < opts.tangential_tol) throw Error(ErrorKind::TangentialImpact, "grazing impact");
  const Vec3 out = (v - 2.0 * v.dot(n) * n).normalized();
  return {PhaseState{hit, out}, BoundaryParam{hit[0], hit[1], 0}, l};
}

Impact surface_step(const PiecewiseSurfaceTable& table, const PhaseState& state, const StepOptions& opts) {
  if (state.x.size() != 3 || state.v.size() != 3)
    throw Error(ErrorKind::DimensionMismatch, "surface step needs a 3-d state");
  check_unit(state.v);
  const Vec3 x = state.x, v = state.v;
  if (!table.contains(x, 1e-7)) throw Error(ErrorKind::InvalidArgument, "start point outside the table");

  std::optional<Candidate> best;
  const auto& pieces = table.pieces();
  for (int i = 0; i < static_cast<int>(pieces.size()); ++i) {
    const auto q = pieces[i].quadric.ray_quadratic(x, v);
    const auto r = roots::solve_quadratic(q[0], q[1], q[2]);
    for (int k = 0; k < r.count; ++k) {
      const double l = r.root[k];
      if (!(l > opts.min_advance) || (best && l >= best->lambda)) continue;
      if (!table.edge_distance(i, x + l * v, 1e-9)) continue;
      best = Candidate{l, i, r.count == 2 ? r.discriminant : 1.0};
    }
  }
  if (!best) throw Error(ErrorKind::NoIntersection, "ray leaves the " + table.name() + " table");
  if (best->discriminant < opts.tangency_discriminant)
    throw Error(ErrorKind::TangentialImpact, "ray touches " + pieces[best->piece].name);

  const auto& quad = pieces[best->piece].quadric;
  auto phi = [&](double l) -> std::optional<double> { return quad.value(x + l * v); };
  auto dphi = [&](double l) -> std::optional<double> { return quad.gradient(x + l * v).dot(v); };
  const double slack = 1e-6 * best->lambda + 1e-12;
  const double l =
      roots::newton_polish(phi, dphi, best->lambda, best->lambda - slack, best->lambda + slack, opts.newton_iterations);

  const Vec3 hit = x + l * v;
  const auto dist = table.edge_distance(best->piece, hit, 1e-9);
  if (!dist || *dist < opts.edge_guard)
    throw Error(ErrorKind::EdgeImpact, "impact within the edge band of " + pieces[best->piece].name);
  const Vec3 n = table.inward_normal(best->piece, hit);
  if (std::abs(v.dot(n)) < opts.tangential_tol) throw Error(ErrorKind::TangentialImpact, "grazing impact");
  const Vec3 out = (v - 2.0 * v.dot(n) * n).normalized();
  return {PhaseState{hit, out}, BoundaryParam{hit[0], hit[1], best->piece}, l};
}

// --- propagation -------------------------------------------------------------------------

Orbit propagate(const Table& table, const InitialCondition& initial, int n_steps, const StepOptions& opts) {
  Orbit orbit;
  orbit.table = table_name(table);
  orbit.wire = std::holds_alternative<WireTable>(table);
  try {
    if (const auto* wire = std::get_if<WireTable>(&table)) {
      const auto* chord0 = std::get_if<WireChord>(&initial);
      if (!chord0) throw Error(ErrorKind::InvalidArgument, "wire tables start from a chord");
      WireChord chord = *chord0;
      orbit.states.push_back(chord_state(*wire, chord));
      orbit.params.push_back({chord.s, chord.t, 0});
      const auto period = wire->curve().period();
      for (int k = 0; k < n_steps; ++k) {
        chord = wire_step(*wire, chord, opts.policy, opts);
        if (period) {
          const double shift = std::floor(chord.s / *period) * *period;
          chord.s -= shift;
          chord.t -= shift;
        }
        orbit.states.push_back(chord_state(*wire, chord));
        orbit.params.push_back({chord.s, chord.t, 0});
      }
      return orbit;
    }

    const auto* state0 = std::get_if<PhaseState>(&initial);
    if (!state0) throw Error(ErrorKind::InvalidArgument, "billiard tables start from a phase state");
    orbit.states.push_back(*state0);
    orbit.params.push_back({});
    PhaseState state = *state0;
    for (int k = 0; k < n_steps; ++k) {
      const Impact hit = std::visit(
          [&](const auto& t) -> Impact {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, PlanarTable>) return planar_step(t, state, opts);
            else if constexpr (std::is_same_v<T, WireTable>) throw Error(ErrorKind::InvalidArgument, "unreachable");
            else return surface_step(t, state, opts);
          },
          table);
      state = hit.state;
      orbit.states.push_back(hit.state);
      orbit.params.push_back(hit.param);
    }
  } catch (const Error& e) {
    orbit.termination = termination_for(e.kind());
    orbit.message = e.what();
  }
  return orbit;
}

// --- sampling --------------------------------------------------------------------------------

Vec Rng::unit_vector(int dim) {
  Vec v(dim);
  do {
    for (int i = 0; i < dim; i += 2) {
      // Box-Muller
      const double u1 = 1.0 - uniform(), u2 = uniform();
      const double r = std::sqrt(-2.0 * std::log(u1));
      v[i] = r * std::cos(kTwoPi * u2);
      if (i + 1 < dim) v[i + 1] = r * std::sin(kTwoPi * u2);
    }
  } while (v.norm() < 1e-6);
  return v / v.norm();
}

InitialCondition sample_initial_condition(const Table& table, Rng& rng) {
  return std::visit(
      [&](const auto& t) -> InitialCondition {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, PlanarTable>) {
          // Box around the bounded part of the table, then rejection.
          double x0 = -1, x1 = 1, y0 = -1, y1 = 1;
          if (const auto* c = std::get_if<Circle>(&t.kind())) {
            x0 = c->center[0] - c->radius, x1 = c->center[0] + c->radius;
            y0 = c->center[1] - c->radius, y1 = c->center[1] + c->radius;
          } else if (const auto* k = std::get_if<CentralConic>(&t.kind())) {
            const double a = std::sqrt(k->a2), b = std::sqrt(std::abs(k->a2 - k->lambda));
            if (k->a2 > k->lambda) {
              x0 = -a, x1 = a, y0 = -b, y1 = b;
            } else {
              x0 = a, x1 = 3.0 * a, y0 = -2.0 * b, y1 = 2.0 * b;
            }
          } else if (const auto* p = std::get_if<Parabola>(&t.kind())) {
            const double vertex = (2.0 * p->p * p->lambda - p->p * p->p) / (2.0 * p->p);
            const double w = 2.0 * std::abs(p->p);
            x0 = std::min(vertex, vertex + (p->p > 0 ? w : -w));
            x1 = std::max(vertex, vertex + (p->p > 0 ? w : -w));
            y0 = -w, y1 = w;
          }
          for (;;) {
            const Vec2 x(rng.uniform(x0, x1), rng.uniform(y0, y1));
            if (t.contains(x, -1e-3)) return PhaseState{x, rng.unit_vector(2)};
          }
        } else if constexpr (std::is_same_v<T, WireTable>) {
          const double span = t.curve().period().value_or(kTwoPi);
          for (;;) {
            const WireChord ch{rng.uniform(0.0, span), rng.uniform(0.0, span)};
            if ((t.curve().eval(ch.t) - t.curve().eval(ch.s)).norm() > 1e-3) return ch;
          }
        } else if constexpr (std::is_same_v<T, ArctanSurface>) {
          const Vec2 u(rng.uniform(-1.0, 1.0), rng.uniform(0.25, 1.25));
          const double depth = rng.uniform(0.05, 0.5);
          const Vec3 x(u[0], u[1], t.height(u) + t.domain_side() * depth);
          return PhaseState{x, rng.unit_vector(3)};
        } else {
          double rmax = 0.0, zmin = 0.0, zmax = 0.0;
          if (const auto* lens = std::get_if<ParabolicLens>(&t.kind())) {
            (void)lens;
            rmax = t.edges().front().radius;
            zmin = t.pieces()[0].quadric.c0;
            zmax = -t.pieces()[1].quadric.c0;
          } else {
            const auto& tt = std::get<TetragonTorus>(t.kind());
            const double z0 = tt.b / (2.0 * tt.a);
            rmax = std::sqrt(tt.s_e2 + tt.focal_shift);
            zmin = z0;
            zmax = z0 + std::sqrt(tt.s_e2);
          }
          for (;;) {
            const Vec3 x(rng.uniform(-rmax, rmax), rng.uniform(-rmax, rmax), rng.uniform(zmin, zmax));
            if (!t.contains(x, -1e-3)) continue;
            return PhaseState{x, rng.unit_vector(3)};
          }
        }
      },
      table);
}

}  // namespace polybill
