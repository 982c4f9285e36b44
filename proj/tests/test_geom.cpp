#include <doctest.h>

#include <numbers>

#include "oracles.hpp"
#include "polybill/dynamics.hpp"
#include "polybill/geom.hpp"
#include "polybill/tables.hpp"

using namespace polybill;
constexpr double kPi = std::numbers::pi;

namespace {

SkewMatrix random_skew(Rng& rng, int n) {
  std::vector<double> upper;
  for (int i = 0; i < n * (n - 1) / 2; ++i) upper.push_back(rng.uniform(-3.0, 3.0));
  return SkewMatrix::from_upper(n, upper);
}

Vec random_vec(Rng& rng, int n) {
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.uniform(-2.0, 2.0);
  return v;
}

}  // namespace

TEST_CASE("unit tangent of catalog curves") {
  const auto circle = PlanarTable::circle(Vec2(0, 0), 1.0);
  const Vec t0 = unit_tangent(circle.curve(), 0.0);
  CHECK(t0[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(t0[1] == doctest::Approx(1.0));

  const auto spiral = WireTable::spiral(1.0, 1.0);
  const Vec ts = unit_tangent(spiral.curve(), 0.0);
  CHECK((ts - Vec3(1, 0, 1) / std::sqrt(2.0)).norm() < 1e-15);

  const auto knot = WireTable::toric_knot(1.0, 1.0, 2, 3);
  Vec expect(4);
  expect << 0, 2, 0, 3;
  CHECK((unit_tangent(knot.curve(), 0.0) - expect / std::sqrt(13.0)).norm() < 1e-15);
}

TEST_CASE("unit tangent rejects a stationary curve") {
  Curve flat(2, [](double) { return Vec2(1, 1).eval(); }, [](double) { return Vec(Vec::Zero(2)); });
  CHECK_THROWS_AS(unit_tangent(flat, 0.3), Error);
  try {
    unit_tangent(flat, 0.3);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateTangent);
  }
}

TEST_CASE("skew matrix keeps A + A^T = 0") {
  SkewMatrix a = SkewMatrix::from_upper(3, {1.0, -2.0, 0.5});
  const Mat d = a.dense();
  CHECK((d + d.transpose()).norm() == 0.0);
  CHECK(a(1, 0) == -1.0);
  CHECK(a(2, 2) == 0.0);
  CHECK(a.transposed()(0, 1) == -1.0);
  Mat bad = Mat::Zero(2, 2);
  bad(0, 1) = 1.0;
  bad(1, 0) = 0.5;
  CHECK_THROWS_AS(SkewMatrix::from_dense(bad), Error);
  CHECK(SkewMatrix::from_dense(d)(0, 2) == -2.0);
}

TEST_CASE("matrix exponential examples") {
  const auto j = SkewMatrix::rotation_blocks({1.0});
  const Vec r = matrix_exp_action(j, kPi / 2, Vec2(1, 0));
  CHECK(std::abs(r[0]) < 1e-15);
  CHECK(r[1] == doctest::Approx(1.0));

  const SkewMatrix zero(3);
  const Vec x0 = Vec3(0.3, -1, 2);
  CHECK((matrix_exp_action(zero, 7.0, x0) - x0).norm() == 0.0);

  const auto a = SkewMatrix::rotation_blocks({2.0, 3.0});
  const double av = 0.7, bv = 1.3;
  Vec g0(4);
  g0 << av, 0, bv, 0;
  for (double t : {-2.0, 0.1, 1.0, 5.5}) {
    Vec expect(4);
    expect << av * std::cos(2 * t), av * std::sin(2 * t), bv * std::cos(3 * t), bv * std::sin(3 * t);
    CHECK((matrix_exp_action(a, t, g0) - expect).norm() <= 1e-12 * expect.norm());
  }
}

TEST_CASE("matrix exponential matches Eigen's dense reference on coupled blocks") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 5;
    const SkewMatrix a = random_skew(rng, n);
    const double t = rng.uniform(-3.0, 3.0);
    // Taylor sum with many terms on a scaled-down argument, then squaring
    Mat m = a.dense() * (t / 1024.0);
    Mat e = Mat::Identity(n, n), term = Mat::Identity(n, n);
    for (int k = 1; k < 30; ++k) {
      term = term * m / k;
      e += term;
    }
    for (int k = 0; k < 10; ++k) e = e * e;
    CHECK((matrix_exp(a, t) - e).norm() < 1e-11);
  }
}

TEST_CASE("property: skew exponential preserves the norm") {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform() * 5.0);
    const SkewMatrix a = random_skew(rng, n);
    const Vec x0 = random_vec(rng, n);
    const double t = rng.uniform(-10.0, 10.0);
    const Vec x = matrix_exp_action(a, t, x0);
    CHECK(std::abs(x.norm() - x0.norm()) <= 1e-12 * std::max(1.0, x0.norm()));
  }
}

TEST_CASE("surface normals") {
  const auto plane = SurfacePatch::graph([](const Vec2&) { return 0.0; }, [](const Vec2&) { return Vec2(0, 0); },
                                         [](const Vec2&) { return true; });
  CHECK(std::abs(std::abs(surface_normal(plane, Vec2(0.3, -2))[2]) - 1.0) < 1e-15);

  const auto lens = make_parabolic_lens(2, 1, 1, -0.5);
  const Vec3 apex = surface_normal(lens.patch(0), Vec2(0, 0));
  CHECK(std::abs(std::abs(apex[2]) - 1.0) < 1e-15);

  // z = f(t) graph: normal parallel to (-2 u1 f', -2 u2 f', 1)
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const Vec2 u(rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6));
    const double fp = -0.5;  // upper paraboloid z = -t/2 + 1
    const Vec3 expect = Vec3(-2 * u[0] * fp, -2 * u[1] * fp, 1).normalized();
    const Vec3 n = surface_normal(lens.patch(1), u);
    CHECK(n.cross(expect).norm() < 1e-12);
    const Partials p = lens.patch(1).partials(u);
    CHECK(std::abs(n.dot(p.r_u1)) < 1e-12);
    CHECK(std::abs(n.dot(p.r_u2)) < 1e-12);
  }
}

TEST_CASE("surface normal rejects a degenerate immersion") {
  SurfacePatch pinched([](const Vec2& u) { return Vec3(u[0], u[0], 0.0); },
                       [](const Vec2&) { return Partials{Vec3(1, 1, 0), Vec3(0, 0, 0)}; },
                       [](const Vec2&) { return true; });
  CHECK_THROWS_AS(surface_normal(pinched, Vec2(0, 0)), Error);
}

TEST_CASE("property: analytic derivatives match central differences") {
  Rng rng(5);
  std::vector<Curve> curves{PlanarTable::circle(Vec2(0.5, -1), 2).curve(), PlanarTable::conic(2, 1).curve(),
                            PlanarTable::conic(1, 3).curve(),           PlanarTable::parabola(1.5, 0.2).curve(),
                            WireTable::spiral(1, 1).curve(),            WireTable::toric_knot(1, 0.5, 2, 3).curve(),
                            WireTable::exp_wire(random_skew(rng, 5), random_vec(rng, 5)).curve()};
  for (const auto& c : curves)
    for (int i = 0; i < 100; ++i) {
      const double t = rng.uniform(-2.0, 2.0);
      const Vec fd = oracle::central_diff([&](double s) { return c.eval(s); }, t);
      const Vec d = c.deriv(t);
      CHECK((fd - d).norm() <= 1e-6 * std::max(1.0, d.norm()));
    }

  const ArctanSurface arctan(1.0, 1.0, ScalarProfile::linear(1.0, 0.0));
  const auto tt = make_tetragon_torus(1, 0, 1, 1, 2, -0.25, -0.5);
  std::vector<SurfacePatch> patches{arctan.patch(), make_parabolic_lens(2, 1, 1, -0.5).patch(0), tt.patch(0),
                                    tt.patch(2)};
  for (std::size_t k = 0; k < patches.size(); ++k) {
    const auto& p = patches[k];
    int checked = 0;
    while (checked < 100) {
      const Vec2 u(rng.uniform(-0.9, 0.9), rng.uniform(0.1, 1.2));
      if (!p.in_domain(u) || !p.in_domain(u + Vec2(1e-5, 1e-5)) || !p.in_domain(u - Vec2(1e-5, 1e-5))) continue;
      ++checked;
      const Partials an = p.partials(u);
      const Vec fd1 = oracle::central_diff([&](double s) { return Vec(p.eval(Vec2(s, u[1]))); }, u[0]);
      const Vec fd2 = oracle::central_diff([&](double s) { return Vec(p.eval(Vec2(u[0], s))); }, u[1]);
      CHECK((fd1 - Vec(an.r_u1)).norm() <= 1e-6 * std::max(1.0, an.r_u1.norm()));
      CHECK((fd2 - Vec(an.r_u2)).norm() <= 1e-6 * std::max(1.0, an.r_u2.norm()));
    }
  }
}

TEST_CASE("property: unit tangent has unit norm") {
  Rng rng(9);
  const auto knot = WireTable::toric_knot(2.0, 0.3, 3, 5);
  for (int i = 0; i < 500; ++i) CHECK(std::abs(unit_tangent(knot.curve(), rng.uniform(-9, 9)).norm() - 1.0) <= 1e-14);
}
