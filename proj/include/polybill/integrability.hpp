#pragma once

#include <string>
#include <variant>
#include <vector>

#include "polybill/geom.hpp"

namespace polybill {

/// b + 4(at - c) f' - 4 a f^2 f' - 4 b t f'^2 - f (2a - 4 b f' - 8 a t f'^2).
double ode_residual_f(double a, double b, double c, double t, double f, double fp);

/// The same expression as a quadratic in f':
/// quad f'^2 + lin f' + constant with quad = 4t(2af - b),
/// lin = 4(at - c) - 4af^2 + 4bf, constant = b - 2af.
struct SlopeQuadratic {
  double quad;
  double lin;
  double constant;
};

SlopeQuadratic slope_quadratic(double a, double b, double c, double t, double f);

// --- planar systems ------------------------------------------------------------------

/// x v2 - y v1 + a v1 + b v2 = h (gamma', v).
struct CircleSystem {
  double a;
  double b;
};
/// M v2 + lambda v1^2 = h1 (gamma', v)^2 + h2.
struct ParabolaSystem {
  double lambda;
};
/// M^2 + lambda v1^2 = h1 (gamma', v)^2 + h2.
struct ConicSystem {
  double lambda;
};

using PlanarSystem = std::variant<CircleSystem, ParabolaSystem, ConicSystem>;

/// Scalar residual with the multipliers eliminated:
///   circle:   a g2' - g2' g2 - b g1' - g1' g1
///   parabola: lambda - g1 + g2 (g1'^2 - g2'^2) / (2 g1' g2')
///   conic:    lambda - g1^2 + g2^2 + g1 g2 (g1'^2 - g2'^2) / (g1' g2')
/// SingularParametrizationPoint where g1' g2' vanishes (parabola, conic).
double residual_planar(const PlanarSystem& system, const Vec2& gamma, const Vec2& gamma_dot);

/// The two circle equations a - g2 - h g1' = 0 and b + g1 - h g2' = 0 with
/// h fitted by least squares.
struct CircleSystemResidual {
  double h;
  double first;
  double second;
};

CircleSystemResidual circle_system_residual(const CircleSystem& system, const Vec2& gamma, const Vec2& gamma_dot);

/// gamma'(t) - A gamma(t) - b.
Vec residual_wire_linear(const SkewMatrix& a, const Vec& b, const Curve& curve, double t);

/// beta - alpha u1 r3_{u2} + alpha u2 r3_{u1}; ChartMismatch unless the patch
/// is a graph chart r = (u1, u2, r3).
double residual_axial_surface(double alpha, double beta, const SurfacePatch& patch, const Vec2& u);

// --- profile reconstruction ----------------------------------------------------------

struct ImplicitODEProblem {
  double a;
  double b;
  double c;
  double t0;
  double f0;
  int branch;  ///< sign of f' at t0 selecting the root of the slope quadratic
  double step;
  double t_end;
};

struct ProfileSample {
  double t;
  double f;
  double fp;
};

struct ProfileSolution {
  std::vector<ProfileSample> samples;
  /// The slope quadratic lost its selected root (discriminant below 1e-12
  /// or |f'| unbounded) before t_end; samples stop at the last good point.
  bool branch_lost = false;
  std::string message;
};

/// Integrates f' = selected root of the slope quadratic with classical RK4.
/// Degenerate when the quadratic has no f' dependence (a = b = 0).
ProfileSolution solve_profile_ode(const ImplicitODEProblem& problem);

}  // namespace polybill
