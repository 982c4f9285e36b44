#include "polybill/integrability.hpp"

#include <cmath>
#include <limits>
#include <optional>

namespace polybill {

double ode_residual_f(double a, double b, double c, double t, double f, double fp) {
  return b + 4.0 * (a * t - c) * fp - 4.0 * a * f * f * fp - 4.0 * b * t * fp * fp -
         f * (2.0 * a - 4.0 * b * fp - 8.0 * a * t * fp * fp);
}

SlopeQuadratic slope_quadratic(double a, double b, double c, double t, double f) {
  return {4.0 * t * (2.0 * a * f - b), 4.0 * (a * t - c) - 4.0 * a * f * f + 4.0 * b * f, b - 2.0 * a * f};
}

namespace {

double product_guard(const Vec2& gd) {
  const double prod = gd[0] * gd[1];
  if (std::abs(prod) <= 1e-14 * gd.squaredNorm())
    throw Error(ErrorKind::SingularParametrizationPoint, "gamma1' gamma2' = 0: residual undefined");
  return prod;
}

}  // namespace

double residual_planar(const PlanarSystem& system, const Vec2& g, const Vec2& gd) {
  return std::visit(
      [&](const auto& s) -> double {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, CircleSystem>) {
          return s.a * gd[1] - gd[1] * g[1] - s.b * gd[0] - gd[0] * g[0];
        } else if constexpr (std::is_same_v<S, ParabolaSystem>) {
          const double prod = product_guard(gd);
          return s.lambda - g[0] + g[1] / (2.0 * prod) * (gd[0] * gd[0] - gd[1] * gd[1]);
        } else {
          const double prod = product_guard(gd);
          return s.lambda - g[0] * g[0] + g[1] * g[1] + g[0] * g[1] / prod * (gd[0] * gd[0] - gd[1] * gd[1]);
        }
      },
      system);
}

CircleSystemResidual circle_system_residual(const CircleSystem& s, const Vec2& g, const Vec2& gd) {
  const double lhs1 = s.a - g[1];
  const double lhs2 = s.b + g[0];
  const double den = gd.squaredNorm();
  if (!(den > 0.0)) throw Error(ErrorKind::DegenerateTangent, "gamma' = 0");
  const double h = (lhs1 * gd[0] + lhs2 * gd[1]) / den;
  return {h, lhs1 - h * gd[0], lhs2 - h * gd[1]};
}

Vec residual_wire_linear(const SkewMatrix& a, const Vec& b, const Curve& curve, double t) {
  if (curve.dim() != a.dim() || b.size() != a.dim())
    throw Error(ErrorKind::DimensionMismatch, "wire residual: dimensions of A, b and the curve differ");
  return curve.deriv(t) - a.apply(curve.eval(t)) - b;
}

double residual_axial_surface(double alpha, double beta, const SurfacePatch& patch, const Vec2& u) {
  if (!patch.is_graph_chart()) throw Error(ErrorKind::ChartMismatch, "patch is not a graph over (u1, u2)");
  const Partials p = patch.partials(u);
  return beta - alpha * u[0] * p.r_u2[2] + alpha * u[1] * p.r_u1[2];
}

namespace {

struct BranchLost {
  std::string why;
};

// Root of the slope quadratic closest to `reference` (or, without one, the
// root whose sign matches `branch`).
double select_slope(const SlopeQuadratic& q, std::optional<double> reference, int branch) {
  const double scale = std::abs(q.lin) + std::abs(q.constant);
  if (std::abs(q.quad) <= 1e-14 * scale) {
    if (q.lin == 0.0) throw Error(ErrorKind::Degenerate, "slope quadratic has no f' dependence");
    return -q.constant / q.lin;
  }
  const double disc = q.lin * q.lin - 4.0 * q.quad * q.constant;
  if (disc < 1e-12) throw BranchLost{"discriminant of the slope quadratic fell below 1e-12"};
  const double sq = std::sqrt(disc);
  const double w = -0.5 * (q.lin + std::copysign(sq, q.lin));
  const double r1 = w / q.quad;
  const double r2 = (w != 0.0) ? q.constant / w : r1;
  if (reference) {
    const double r = std::abs(r1 - *reference) <= std::abs(r2 - *reference) ? r1 : r2;
    // a flip to a much smaller slope of opposite sign means the step went
    // past a turning point and landed on the other family
    const double lo = std::min(std::abs(r), std::abs(*reference)), hi = std::max(std::abs(r), std::abs(*reference));
    if ((r < 0.0) != (*reference < 0.0) && hi > 10.0 * lo && hi - lo > 1e-3)
      throw BranchLost{"slope jumped across a turning point"};
    return r;
  }
  const bool m1 = (r1 < 0.0) == (branch < 0), m2 = (r2 < 0.0) == (branch < 0);
  if (m1 && !m2) return r1;
  if (m2 && !m1) return r2;
  return std::abs(r1) <= std::abs(r2) ? r1 : r2;
}

}  // namespace

ProfileSolution solve_profile_ode(const ImplicitODEProblem& pb) {
  if (pb.a == 0.0 && pb.b == 0.0)
    throw Error(ErrorKind::Degenerate, "a = b = 0: the equation reduces to -4c f' = 0");
  if (!(pb.step > 0.0)) throw Error(ErrorKind::InvalidArgument, "step must be positive");
  if (!(pb.t_end >= pb.t0)) throw Error(ErrorKind::InvalidArgument, "t_end must not precede t0");

  auto slope = [&](double t, double f, std::optional<double> ref) {
    const double s = select_slope(slope_quadratic(pb.a, pb.b, pb.c, t, f), ref, pb.branch);
    if (!std::isfinite(s) || std::abs(s) > 1e8) throw BranchLost{"|f'| unbounded (turning point)"};
    return s;
  };

  ProfileSolution out;
  double t = pb.t0, f = pb.f0;
  double fp = 0.0;
  try {
    fp = slope(t, f, std::nullopt);
  } catch (const BranchLost& e) {
    throw Error(ErrorKind::BranchLoss, "no real slope at the initial point: " + e.why);
  }
  out.samples.push_back({t, f, fp});

  try {
    while (t < pb.t_end) {
      const double h = std::min(pb.step, pb.t_end - t);
      const double k1 = fp;
      const double k2 = slope(t + 0.5 * h, f + 0.5 * h * k1, k1);
      const double k3 = slope(t + 0.5 * h, f + 0.5 * h * k2, k2);
      const double k4 = slope(t + h, f + h * k3, k3);
      const double f_next = f + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
      const double t_next = (pb.t_end - t <= pb.step) ? pb.t_end : t + h;
      const double fp_next = slope(t_next, f_next, k4);
      t = t_next;
      f = f_next;
      fp = fp_next;
      out.samples.push_back({t, f, fp});
    }
  } catch (const BranchLost& e) {
    out.branch_lost = true;
    out.message = e.why;
  }
  return out;
}

}  // namespace polybill
