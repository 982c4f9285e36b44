#include <doctest.h>

#include <numbers>

#include "oracles.hpp"
#include "polybill/dynamics.hpp"
#include "polybill/integrals.hpp"

using namespace polybill;
constexpr double kPi = std::numbers::pi;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("planar step examples") {
  const auto disk = PlanarTable::circle(Vec2(0, 0), 1.0);
  auto hit = planar_step(disk, {Vec2(1, 0), Vec2(-1, 0)});
  CHECK((hit.state.x - Vec2(-1, 0)).norm() < 1e-15);
  CHECK((hit.state.v - Vec2(1, 0)).norm() < 1e-15);

  const PhaseState s{Vec2(1, 0), Vec2(-1, 1) / std::sqrt(2.0)};
  hit = planar_step(disk, s);
  CHECK((hit.state.x - Vec2(0, 1)).norm() < 1e-15);
  CHECK((hit.state.v - Vec2(-1, -1) / std::sqrt(2.0)).norm() < 1e-15);
  const IntegralSpec m3 = PlanarDeg1{0, 0};
  CHECK(eval_integral(m3, s) == doctest::Approx(std::sqrt(0.5)));
  CHECK(eval_integral(m3, hit.state) == doctest::Approx(std::sqrt(0.5)));

  const auto ell = PlanarTable::conic(2, 1);
  const PhaseState e0{Vec2(0, 0.5), Vec2(1, 0)};
  const IntegralSpec f = ConicIntegral{1.0};
  CHECK(eval_integral(f, e0) == doctest::Approx(1.25));
  hit = planar_step(ell, e0);
  CHECK(eval_integral(f, hit.state) == doctest::Approx(1.25).epsilon(1e-14));
}

TEST_CASE("planar step errors") {
  const auto parabola = PlanarTable::parabola(1, 0);
  CHECK(kind_of([&] { planar_step(parabola, {Vec2(0, 0), Vec2(1, 0)}); }) == ErrorKind::NoIntersection);
  const auto disk = PlanarTable::circle(Vec2(0, 0), 1.0);
  CHECK(kind_of([&] { planar_step(disk, {Vec2(0, 0), Vec2(2, 0)}); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { planar_step(disk, {Vec3(0, 0, 0), Vec3(1, 0, 0)}); }) == ErrorKind::DimensionMismatch);
  // grazing: shallow ray with a coarse tangency tolerance
  StepOptions coarse;
  coarse.tangential_tol = 0.5;
  CHECK(kind_of([&] { planar_step(disk, {Vec2(0, 0.95), Vec2(1, 0)}, coarse); }) == ErrorKind::TangentialImpact);
  CHECK_NOTHROW(planar_step(disk, {Vec2(0, 0.95), Vec2(1, 0)}));
}

TEST_CASE("property: reflections preserve tangential and flip normal components") {
  Rng rng(31);
  const PlanarTable tables[] = {PlanarTable::circle(Vec2(0.2, 0.1), 1.3), PlanarTable::conic(2, 1)};
  for (const auto& t : tables) {
    PhaseState s = std::get<PhaseState>(sample_initial_condition(t, rng));
    for (int i = 0; i < 300; ++i) {
      const auto hit = planar_step(t, s);
      const Vec2 n = t.inward_normal(hit.state.x);
      const Vec2 tau(-n[1], n[0]);
      CHECK(std::abs(hit.state.v.dot(n) + s.v.dot(n)) < 1e-12);
      CHECK(std::abs(hit.state.v.dot(tau) - s.v.dot(tau)) < 1e-12);
      CHECK(std::abs(hit.state.v.norm() - 1.0) < 1e-12);
      // involution: reflecting again at the same point restores v
      CHECK((reflect(hit.state.v, n) - s.v).norm() < 1e-14);
      s = hit.state;
    }
  }
}

TEST_CASE("propagate: diameter orbit and terminations") {
  const auto disk = PlanarTable::circle(Vec2(0, 0), 1.0);
  const auto orbit = propagate(disk, PhaseState{Vec2(1, 0), Vec2(-1, 0)}, 4);
  REQUIRE(orbit.states.size() == 5);
  for (int k = 1; k <= 4; ++k) CHECK(orbit.states[k].x[0] == doctest::Approx(k % 2 ? -1.0 : 1.0));
  CHECK(orbit.termination == Termination::Completed);

  const auto esc = propagate(PlanarTable::parabola(1, 0), PhaseState{Vec2(0, 0), Vec2(1, 0)}, 10);
  CHECK(esc.termination == Termination::NoIntersection);
  CHECK(esc.n_impacts() == 0);

  const auto bad = propagate(disk, WireChord{0, 1}, 3);
  CHECK(bad.termination == Termination::InvalidState);
}

TEST_CASE("property: unit speed survives long planar orbits") {
  Rng rng(32);
  const auto ell = PlanarTable::conic(3, 1.2);
  const auto orbit = propagate(ell, sample_initial_condition(ell, rng), 10000);
  REQUIRE(orbit.termination == Termination::Completed);
  double worst = 0.0;
  for (const auto& s : orbit.states) worst = std::max(worst, std::abs(s.v.norm() - 1.0));
  CHECK(worst <= 1e-10);
  // midpoints of every chord stay inside
  for (std::size_t k = 1; k < orbit.states.size(); ++k)
    CHECK(ell.contains(0.5 * (Vec2(orbit.states[k - 1].x) + Vec2(orbit.states[k].x)), 1e-12));
}

TEST_CASE("wire step on a circle wire lands a quarter turn further") {
  const auto circle = WireTable::spiral(1.0, 0.0);
  const auto next = wire_step(circle, {0.0, kPi / 2}, BranchPolicy::Forward);
  CHECK(next.s == doctest::Approx(kPi / 2));
  CHECK(next.t == doctest::Approx(kPi).epsilon(1e-12));
  const auto near = wire_step(circle, {0.0, kPi / 2}, BranchPolicy::Nearest);
  CHECK(near.t == doctest::Approx(kPi).epsilon(1e-12));
}

TEST_CASE("wire step errors") {
  const auto spiral = WireTable::spiral(1.0, 1.0);
  CHECK(kind_of([&] { wire_step(spiral, {0.4, 0.4}, BranchPolicy::Forward); }) == ErrorKind::InvalidArgument);
  StepOptions tiny;
  tiny.wire_window = 1e-3;
  CHECK(kind_of([&] { wire_step(spiral, {0.0, 1.0}, BranchPolicy::Forward, tiny); }) == ErrorKind::NoReflection);
}

TEST_CASE("wire step: equal angles at accepted roots and agreement with a fine-scan oracle") {
  Rng rng(33);
  const WireTable wires[] = {WireTable::spiral(1, 1), WireTable::toric_knot(1, 1, 2, 3),
                             WireTable::exp_wire(SkewMatrix::rotation_blocks({2, 3}),
                                                 (Vec(4) << 1, 0, 1, 0).finished())};
  for (const auto& w : wires) {
    int checked = 0;
    for (int i = 0; i < 40; ++i) {
      const auto ch = std::get<WireChord>(sample_initial_condition(w, rng));
      WireChord next;
      const double window = w.curve().period().value_or(4 * kPi);
      const auto ref = oracle::wire_forward_root(w, ch, window, 2048L * 100L);
      try {
        next = wire_step(w, ch, BranchPolicy::Forward);
      } catch (const Error& e) {
        // backward chords on the helix reflect backward; the oracle must agree
        CHECK(e.kind() == ErrorKind::NoReflection);
        CHECK_FALSE(ref.has_value());
        ++checked;
        continue;
      }
      CHECK(std::abs(*wire_reflection_gap(w, ch, next.t)) <= 1e-12);
      REQUIRE(ref.has_value());
      CHECK(std::abs(*ref - next.t) <= 1e-9);
      ++checked;
    }
    CHECK(checked >= 30);
  }
}

TEST_CASE("wire propagation is deterministic and keeps unit chords") {
  const auto knot = WireTable::toric_knot(1, 1, 2, 3);
  for (auto policy : {BranchPolicy::Forward, BranchPolicy::Nearest}) {
    StepOptions opts;
    opts.policy = policy;
    const auto a = propagate(knot, WireChord{0.1, 0.9}, 200, opts);
    const auto b = propagate(knot, WireChord{0.1, 0.9}, 200, opts);
    REQUIRE(a.termination == Termination::Completed);
    REQUIRE(a.states.size() == b.states.size());
    for (std::size_t k = 0; k < a.states.size(); ++k) {
      CHECK((a.states[k].x - b.states[k].x).norm() == 0.0);
      CHECK(std::abs(a.states[k].v.norm() - 1.0) < 1e-13);
      // chord k starts where chord k-1 ended
      if (k > 0) CHECK(std::abs(std::remainder(a.params[k].p1 - a.params[k - 1].p2, 2 * kPi)) < 1e-9);
    }
  }
}

TEST_CASE("lens: axial rays bounce between the apexes") {
  const auto lens = make_parabolic_lens(2, 1, 1, -0.5);
  auto hit = surface_step(lens, {Vec3(0, 0, 0.5), Vec3(0, 0, -1)});
  CHECK((hit.state.x - Vec3(0, 0, 0.25)).norm() < 1e-15);
  CHECK((hit.state.v - Vec3(0, 0, 1)).norm() < 1e-15);
  hit = surface_step(lens, {Vec3(0, 0, 0.5), Vec3(0, 0, 1)});
  CHECK((hit.state.x - Vec3(0, 0, 1)).norm() < 1e-15);
  CHECK((hit.state.v - Vec3(0, 0, -1)).norm() < 1e-15);
  const auto orbit = propagate(lens, PhaseState{Vec3(0, 0, 0.5), Vec3(0, 0, 1)}, 6);
  REQUIRE(orbit.n_impacts() == 6);
  CHECK((orbit.states[2].x - orbit.states[4].x).norm() < 1e-15);
  CHECK((orbit.states[1].x - orbit.states[3].x).norm() < 1e-15);
}

TEST_CASE("lens: a ray aimed at the edge circle terminates") {
  const auto lens = make_parabolic_lens(2, 1, 1, -0.5);
  const Vec3 x(0, 0, 0.5);
  const Vec3 v = (Vec3(1 / std::sqrt(2.0), 0, 0.75) - x).normalized();
  CHECK(kind_of([&] { surface_step(lens, {x, v}); }) == ErrorKind::EdgeImpact);
  const auto orbit = propagate(lens, PhaseState{x, v}, 3);
  CHECK(orbit.termination == Termination::EdgeImpact);
}

TEST_CASE("property: surface reflection preserves S1 and S2") {
  Rng rng(34);
  const ArctanSurface flat_twist(1.0, 0.0, ScalarProfile::linear(0.7, 0.2));
  const ArctanSurface twist(1.0, 1.0, ScalarProfile::linear(1.0, 0.0));
  for (const auto* s : {&flat_twist, &twist}) {
    const auto patch = s->patch();
    int n = 0;
    while (n < 1000) {
      const auto ic = std::get<PhaseState>(sample_initial_condition(*s, rng));
      Impact hit;
      try {
        hit = surface_step(*s, ic);
      } catch (const Error&) {
        continue;
      }
      ++n;
      const Partials p = patch.partials(Vec2(hit.state.x[0], hit.state.x[1]));
      CHECK(std::abs(ic.v.dot(p.r_u1) - hit.state.v.dot(p.r_u1)) <= 1e-11);
      CHECK(std::abs(ic.v.dot(p.r_u2) - hit.state.v.dot(p.r_u2)) <= 1e-11);
      CHECK(std::abs(s->implicit(hit.state.x)) <= 1e-12);
    }
  }
}

TEST_CASE("impact points agree with a fine-scan oracle (planar and surfaces)") {
  Rng rng(35);
  const PlanarTable planar[] = {PlanarTable::circle(Vec2(0, 0), 1), PlanarTable::conic(2, 1),
                                PlanarTable::parabola(1, 0), PlanarTable::conic(1, 2)};
  for (const auto& t : planar) {
    int checked = 0;
    while (checked < 100) {
      const auto s = std::get<PhaseState>(sample_initial_condition(t, rng));
      Impact hit;
      try {
        hit = planar_step(t, s);
      } catch (const Error&) {
        continue;
      }
      if (hit.ray_length > 50) continue;
      const auto ref = oracle::ray_exit(
          [&](const Vec& p) -> std::optional<double> {
            if (!t.on_table_branch(p)) return 1.0;
            return t.implicit(p);
          },
          s.x, s.v, 60.0, 200000);
      REQUIRE(ref.has_value());
      CHECK(std::abs(*ref - hit.ray_length) <= 1e-9);
      ++checked;
    }
  }

  const PiecewiseSurfaceTable solids[] = {make_parabolic_lens(2, 1, 1, -0.5),
                                          make_tetragon_torus(1, 0, 1, 1, 2, -0.25, -0.5)};
  for (const auto& t : solids) {
    int checked = 0;
    while (checked < 100) {
      const auto s = std::get<PhaseState>(sample_initial_condition(t, rng));
      Impact hit;
      try {
        hit = surface_step(t, s);
      } catch (const Error&) {
        continue;
      }
      const auto ref = oracle::ray_exit(
          [&](const Vec& p) -> std::optional<double> {
            double m = -std::numeric_limits<double>::infinity();
            for (const auto& pc : t.pieces()) m = std::max(m, pc.quadric.value(p));
            return m;
          },
          s.x, s.v, 6.0, 200000);
      REQUIRE(ref.has_value());
      CHECK(std::abs(*ref - hit.ray_length) <= 1e-9);
      ++checked;
    }
  }
}
