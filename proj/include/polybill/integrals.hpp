#pragma once

#include <string>
#include <variant>
#include <vector>

#include "polybill/dynamics.hpp"
#include "polybill/geom.hpp"
#include "polybill/tables.hpp"

namespace polybill {

/// F = <x, A v> + <b, v> = sum_{i<j} a_ij (v_j x_i - v_i x_j) + <b, v>.
struct LinearMomentum {
  SkewMatrix a;
  Vec b;
};

/// F = x v2 - y v1 + a v1 + b v2.
struct PlanarDeg1 {
  double a;
  double b;
};

/// F = M v2 + lambda v1^2 with M = x v2 - y v1.
struct ParabolaIntegral {
  double lambda;
};

/// F = M^2 + lambda v1^2.
struct ConicIntegral {
  double lambda;
};

/// F = alpha M3 + beta v3.
struct AxialDeg1 {
  double alpha;
  double beta;
};

/// F2 = a (M1^2 + M2^2) + b (M1 v2 - M2 v1) + c (v1^2 + v2^2).
struct Degree2Axial {
  double a;
  double b;
  double c;
};

using IntegralSpec =
    std::variant<LinearMomentum, PlanarDeg1, ParabolaIntegral, ConicIntegral, AxialDeg1, Degree2Axial>;

/// Stable textual id, e.g. "conic(1)" or "degree2(0,2,1)".
std::string integral_id(const IntegralSpec& spec);

double eval_integral(const IntegralSpec& spec, const Vec& x, const Vec& v);
inline double eval_integral(const IntegralSpec& spec, const PhaseState& s) { return eval_integral(spec, s.x, s.v); }

/// M_ij = v_j x_i - v_i x_j, stored as an antisymmetric matrix.
Mat angular_momenta(const Vec& x, const Vec& v);
/// (M1, M2, M3) = (x2 v3 - x3 v2, x3 v1 - x1 v3, x1 v2 - x2 v1).
Vec3 axial_momenta(const Vec3& x, const Vec3& v);

struct TangentialData {
  double s1;
  double s2;
};

inline TangentialData tangential_data(const Partials& p, const Vec3& v) { return {v.dot(p.r_u1), v.dot(p.r_u2)}; }

/// Drift of one integral along an orbit. `series` holds F at every
/// evaluation point in order: the initial state, then for each impact the
/// segment midpoint, the incoming state and the outgoing state.
struct ConservationReport {
  std::string integral;
  double f0 = 0.0;
  double max_abs_drift = 0.0;
  double max_rel_drift = 0.0;
  std::vector<double> series;
  std::size_t n_impacts = 0;
};

/// Relative drifts are taken against max(|F0|, 1e-3).
std::vector<ConservationReport> audit_orbit(const Orbit& orbit, const std::vector<IntegralSpec>& specs);

/// F at x = gamma(s) (or gamma(t) with at_end) and v = unit chord.
double wire_chord_integral(const WireTable& table, const WireChord& chord, const IntegralSpec& spec,
                           bool at_end = false);

/// The degree-one integral of a wire: <x, A v> for exp(At) gamma0 wires,
/// <A x + b, v> = <x, A^T v> + <b, v> for the spiral's affine system.
IntegralSpec wire_integral(const WireTable& table);

/// The integrals each catalog table is known to carry.
std::vector<IntegralSpec> natural_integrals(const Table& table);

// --- multiplier identities ---------------------------------------------------------

struct AxialMultipliers {
  double h1;
  double h2;
};

/// h1, h2 with alpha M3 + beta v3 = h1 S1 + h2 S2 on a surface r(u).
AxialMultipliers axial_multipliers(double alpha, const Vec3& r, const Partials& p);

/// alpha M3 + beta v3 - (h1 S1 + h2 S2) at r(u) for velocity v.
double axial_identity_residual(const ArctanSurface& surface, const Vec2& u, const Vec3& v);

/// Multipliers of F2 = h11 S1^2 + h12 S1 S2 + h22 S2^2 + h |v|^2 on
/// z = f(u1^2 + u2^2), all taken at t = u1^2 + u2^2.
struct ProfileMultipliers {
  double h11;
  double h12;
  double h22;
  double h;          ///< a t - 4 h11 t f'^2
  double h_printed;  ///< a t - 4 h11 t f', the form with a single f'
  /// h11 (1 - 4 f'^2 t) - ((a - b) f + (c - a t)), the printed form.
  double constraint_printed;
  /// h11 (1 - 4 f'^2 t) - (a f^2 - b f + c - a t), read off the v1^2 coefficient.
  double constraint;
};

ProfileMultipliers profile_multipliers(const ProfileFamily& family, double t, int branch = 1);

struct ProfileIdentityCheck {
  double residual;          ///< F2 - (h11 S1^2 + h22 S2^2 + h)
  double printed_residual;  ///< same with h_printed
  double printed_constraint;
  bool printed_form_warning;  ///< printed forms violated beyond 1e-9
};

/// Pointwise check of the degree-two decomposition at r(u) for unit v.
ProfileIdentityCheck profile_identity_check(const ProfileFamily& family, int branch, const Vec2& u, const Vec3& v);

}  // namespace polybill
