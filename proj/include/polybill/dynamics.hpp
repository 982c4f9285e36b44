#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "polybill/geom.hpp"
#include "polybill/tables.hpp"

namespace polybill {

/// Particle position and unit velocity.
struct PhaseState {
  Vec x;
  Vec v;
};

/// Chord gamma(s) -> gamma(t) of a wire billiard.
struct WireChord {
  double s;
  double t;
};

using InitialCondition = std::variant<PhaseState, WireChord>;

/// Where an impact happened: the curve parameter (planar), the graph-chart
/// coordinates (surfaces) or the chord parameters (s, t) for wires.
struct BoundaryParam {
  double p1 = std::numeric_limits<double>::quiet_NaN();
  double p2 = std::numeric_limits<double>::quiet_NaN();
  int piece = -1;
};

struct Impact {
  PhaseState state;  ///< impact point with the reflected velocity
  BoundaryParam param;
  double ray_length;  ///< distance travelled from the previous state
};

enum class BranchPolicy {
  Forward,  ///< smallest root s1 > t inside the window
  Nearest,  ///< root closest to t on either side, excluding s
};

struct StepOptions {
  double min_advance = 1e-9;
  double edge_guard = 1e-7;
  double tangential_tol = 1e-10;
  double tangency_discriminant = 1e-14;
  int scan_intervals = 2048;
  double bisection_tol = 1e-13;
  int newton_iterations = 5;
  /// Ray length scanned on non-quadric surfaces.
  double surface_window = 10.0;
  /// Parameter window for wire roots; defaults to one period, or 4 pi.
  std::optional<double> wire_window;
  BranchPolicy policy = BranchPolicy::Forward;
};

enum class Termination {
  Completed,
  NoIntersection,
  TangentialImpact,
  EdgeImpact,
  NoReflection,
  AmbiguousBranch,
  InvalidState,
};

std::string_view to_string(Termination t);

/// states[0] is the initial state; states[k] (k >= 1) is the k-th impact
/// point with the outgoing velocity, so the incoming velocity at impact k is
/// states[k-1].v. For wires, states[k] = (gamma(s_k), unit chord) and
/// params[k] = (s_k, t_k).
struct Orbit {
  std::string table;
  bool wire = false;
  std::vector<PhaseState> states;
  std::vector<BoundaryParam> params;
  Termination termination = Termination::Completed;
  std::string message;

  std::size_t n_impacts() const { return states.empty() ? 0 : states.size() - 1; }
};

Impact planar_step(const PlanarTable& table, const PhaseState& state, const StepOptions& opts = {});

/// g(sigma) = <u_out(sigma), tau> - <u_in, tau> at the chord end gamma(t);
/// empty where the outgoing chord degenerates.
std::optional<double> wire_reflection_gap(const WireTable& table, const WireChord& chord, double sigma);

WireChord wire_step(const WireTable& table, const WireChord& chord, BranchPolicy policy,
                    const StepOptions& opts = {});

Impact surface_step(const ArctanSurface& table, const PhaseState& state, const StepOptions& opts = {});
Impact surface_step(const PiecewiseSurfaceTable& table, const PhaseState& state, const StepOptions& opts = {});

/// x = gamma(s) and v = the unit chord direction.
PhaseState chord_state(const WireTable& table, const WireChord& chord);

/// Applies the table's step up to n_steps times. Step errors end the orbit
/// with a termination flag instead of propagating.
Orbit propagate(const Table& table, const InitialCondition& initial, int n_steps, const StepOptions& opts = {});

/// Seeded generator with a platform-independent mapping to doubles.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  Vec unit_vector(int dim);

 private:
  std::mt19937_64 engine_;
};

/// A random valid starting condition strictly inside the table.
InitialCondition sample_initial_condition(const Table& table, Rng& rng);

}  // namespace polybill
