#include "polybill/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "polybill/cli/config.hpp"
#include "polybill/cli/svg.hpp"
#include "polybill/cli/trajectory_io.hpp"
#include "polybill/integrability.hpp"

namespace polybill::cli {

namespace {

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-")
    out << content;
  else
    write_atomic(path, content);
}

// Errors in inputs map to exit code 2; anything else is a bug and rethrown.
template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

InitialCondition initial_condition(const Table& table, const RunConfig& run) {
  const bool wire = std::holds_alternative<WireTable>(table);
  if (wire) {
    if (run.x0 || run.v0) throw Error(ErrorKind::ConfigError, "wire tables start from a chord: use --chord s,t");
    if (run.chord) {
      if (run.chord->size() != 2) throw Error(ErrorKind::ConfigError, "--chord needs two parameters s,t");
      return WireChord{(*run.chord)[0], (*run.chord)[1]};
    }
  } else {
    if (run.chord) throw Error(ErrorKind::ConfigError, "--chord applies to wire tables only");
    if (run.x0.has_value() != run.v0.has_value())
      throw Error(ErrorKind::ConfigError, "--x0 and --v0 must be given together");
    if (run.x0) {
      const int dim = std::holds_alternative<PlanarTable>(table) ? 2 : 3;
      if (static_cast<int>(run.x0->size()) != dim || static_cast<int>(run.v0->size()) != dim)
        throw Error(ErrorKind::ConfigError, "--x0/--v0 need " + std::to_string(dim) + " components");
      const Vec x = Eigen::Map<const Vec>(run.x0->data(), dim);
      const Vec v = Eigen::Map<const Vec>(run.v0->data(), dim);
      if (!(v.norm() > 0.0)) throw Error(ErrorKind::ConfigError, "--v0 is the zero vector");
      return PhaseState{x, v.normalized()};
    }
  }
  Rng rng(run.seed);
  return sample_initial_condition(table, rng);
}

RunConfig merged_run(const ConfigFile& cfg, const SimulateArgs& a) {
  RunConfig run = cfg.run;
  if (a.x0) run.x0 = a.x0;
  if (a.v0) run.v0 = a.v0;
  if (a.chord) run.chord = a.chord;
  if (a.steps) run.steps = *a.steps;
  if (a.integrals) run.integrals = *a.integrals;
  if (a.policy) run.policy = parse_policy(*a.policy);
  if (a.seed) run.seed = *a.seed;
  if (run.steps < 0) throw Error(ErrorKind::ConfigError, "--steps must be non-negative");
  return run;
}

nlohmann::json report_json(const ConservationReport& r, double threshold) {
  const bool pass = r.n_impacts > 0 && r.max_rel_drift <= threshold;
  return {{"integral", r.integral},   {"F0", r.f0},
          {"max_abs_drift", r.max_abs_drift}, {"max_rel_drift", r.max_rel_drift},
          {"n_impacts", r.n_impacts}, {"pass", pass},
          {"threshold", threshold}};
}

// --- ode-check samplers ----------------------------------------------------------

struct Residual {
  std::string where;
  double param;
  double value;
};

std::vector<Residual> planar_residuals(const PlanarTable& t, int n, Rng& rng) {
  PlanarSystem system = CircleSystem{0.0, 0.0};
  double lo = 0.0, hi = 2.0 * std::numbers::pi;
  if (const auto* c = std::get_if<Circle>(&t.kind())) {
    system = CircleSystem{c->center[1], -c->center[0]};
  } else if (const auto* k = std::get_if<CentralConic>(&t.kind())) {
    system = ConicSystem{k->lambda};
    if (k->a2 < k->lambda) lo = -2.0, hi = 2.0;
  } else {
    system = ParabolaSystem{std::get<Parabola>(t.kind()).lambda};
    lo = -3.0, hi = 3.0;
  }
  std::vector<Residual> out;
  for (int i = 0; i < n; ++i) {
    const double s = rng.uniform(lo, hi);
    const Vec2 gd = t.curve().deriv(s);
    // keep clear of the axis crossings where the residual is undefined
    if (!std::holds_alternative<CircleSystem>(system) && std::abs(gd[0] * gd[1]) <= 1e-6) continue;
    out.push_back({"curve", s, std::abs(residual_planar(system, t.curve().eval(s), gd))});
  }
  return out;
}

std::vector<Residual> wire_residuals(const WireTable& t, int n, Rng& rng) {
  const LinearSystem sys = t.linear_system();
  const double hi = t.curve().period().value_or(4.0 * std::numbers::pi);
  std::vector<Residual> out;
  for (int i = 0; i < n; ++i) {
    const double s = rng.uniform(0.0, hi);
    out.push_back({"curve", s, residual_wire_linear(sys.a, sys.b, t.curve(), s).norm()});
  }
  return out;
}

std::vector<Residual> surface_residuals(const ArctanSurface& t, int n, Rng& rng) {
  const SurfacePatch patch = t.patch();
  std::vector<Residual> out;
  while (static_cast<int>(out.size()) < n) {
    const Vec2 u(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0));
    if (!t.in_chart(u) || u.norm() < 1e-3) continue;
    out.push_back({"patch", u.squaredNorm(), std::abs(residual_axial_surface(t.alpha(), t.beta(), patch, u))});
  }
  return out;
}

std::vector<Residual> piecewise_residuals(const PiecewiseSurfaceTable& t, int n, Rng& rng, std::ostream& err) {
  std::vector<Residual> out;
  for (int i = 0; i < static_cast<int>(t.pieces().size()); ++i) {
    const SurfacePiece& piece = t.pieces()[i];
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& e : t.edges())
      if (e.piece_a == i || e.piece_b == i) {
        lo = std::min(lo, e.radius * e.radius);
        hi = std::max(hi, e.radius * e.radius);
      }
    if (std::holds_alternative<ParabolicLens>(t.kind())) lo = 0.0;
    const ProfileFamily& fam = piece.profile;
    int printed_bad = 0;
    for (int k = 0; k < n; ++k) {
      const double s = rng.uniform(lo, hi);
      const ProfileValue pv = profile_eval(fam, s, piece.branch);
      out.push_back({piece.name, s, std::abs(ode_residual_f(fam.a(), fam.b(), fam.c(), s, pv.f, pv.fp))});
      const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
      const Vec2 u = std::sqrt(s) * Vec2(std::cos(phi), std::sin(phi));
      if (profile_identity_check(fam, piece.branch, u, rng.unit_vector(3)).printed_form_warning) ++printed_bad;
    }
    // not an error: the f'^2 form of h is the one that holds
    if (printed_bad > 0)
      err << "warning: " << piece.name << ": printed multiplier forms off by > 1e-9 at " << printed_bad << " of " << n
          << " points\n";
  }
  return out;
}

// --- sweep -------------------------------------------------------------------------

struct GridAxis {
  std::string key;
  std::vector<std::string> values;
};

GridAxis parse_axis(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw Error(ErrorKind::ConfigError, "grid axis must read key=v1,v2,...: '" + text + "'");
  GridAxis axis{text.substr(0, eq), {}};
  std::istringstream in(text.substr(eq + 1));
  std::string v;
  while (std::getline(in, v, ',')) {
    parse_number_list(v, axis.key);
    axis.values.push_back(v);
  }
  if (axis.values.empty()) throw Error(ErrorKind::ConfigError, "grid axis '" + axis.key + "' has no values");
  return axis;
}

struct SweepRow {
  std::string status = "ok";
  std::string termination;
  std::size_t n_impacts = 0;
  std::vector<double> drifts;
};

}  // namespace

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ConfigFile cfg = load_config(args.table);
    const RunConfig run = merged_run(cfg, args);
    const Table table = build_table(cfg.table_section);
    const auto integrals = parse_integral_list(run.integrals, table);
    const InitialCondition ic = initial_condition(table, run);
    StepOptions opts;
    opts.policy = run.policy;
    const Orbit orbit = propagate(table, ic, run.steps, opts);
    emit(args.out, format_trajectory(orbit, param_columns(table), integrals), out);
    if (orbit.termination != Termination::Completed) {
      err << "termination: " << to_string(orbit.termination) << " after " << orbit.n_impacts() << " impacts: "
          << orbit.message << '\n';
      return static_cast<int>(kExitDynamics);
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    std::optional<Table> table;
    if (!args.table.empty()) table = build_table(load_config(args.table).table_section);
    const auto integrals = parse_integral_list(args.integrals, table ? &*table : nullptr);
    const Orbit orbit = read_trajectory(args.trajectory);
    const auto reports = audit_orbit(orbit, integrals);
    bool pass = true;
    nlohmann::json doc;
    for (const auto& r : reports) {
      const auto j = report_json(r, args.threshold);
      pass = pass && j["pass"].get<bool>();
      if (reports.size() == 1)
        doc = j;
      else
        doc.push_back(j);
    }
    emit(args.out, doc.dump(2) + "\n", out);
    if (!pass) err << "verification failed at threshold " << args.threshold << '\n';
    return static_cast<int>(pass ? kExitOk : kExitVerify);
  });
}

int cmd_ode_check(const OdeCheckArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (args.samples <= 0) throw Error(ErrorKind::ConfigError, "--samples must be positive");
    const Table table = build_table(load_config(args.table).table_section);
    Rng rng(args.seed);
    const auto residuals = std::visit(
        [&](const auto& t) {
          using T = std::decay_t<decltype(t)>;
          if constexpr (std::is_same_v<T, PlanarTable>) return planar_residuals(t, args.samples, rng);
          else if constexpr (std::is_same_v<T, WireTable>) return wire_residuals(t, args.samples, rng);
          else if constexpr (std::is_same_v<T, ArctanSurface>) return surface_residuals(t, args.samples, rng);
          else return piecewise_residuals(t, args.samples, rng, err);
        },
        table);
    std::string csv = "piece,t,residual\n";
    double worst = 0.0;
    for (const auto& r : residuals) {
      csv += r.where + "," + g17(r.param) + "," + g17(r.value) + "\n";
      worst = std::max(worst, r.value);
    }
    emit(args.out, csv, out);
    err << "ode-check: " << residuals.size() << " points, max residual " << g17(worst) << '\n';
    return static_cast<int>(worst <= args.threshold ? kExitOk : kExitVerify);
  });
}

int cmd_figure(const FigureArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    std::optional<Table> table;
    if (!args.table.empty()) table = build_table(load_config(args.table).table_section);
    std::string svg;
    auto piecewise = [&](bool lens) {
      if (!table) return lens ? make_parabolic_lens(2.0, 1.0, 1.0, -0.5) : make_tetragon_torus(1, 0, 1, 1, 2, -0.25, -0.5);
      const auto* p = std::get_if<PiecewiseSurfaceTable>(&*table);
      if (!p) throw Error(ErrorKind::ConfigError, "figure '" + args.kind + "' needs a piecewise surface table");
      return *p;
    };
    if (args.kind == "parabolic_lens_profile") {
      svg = figure_lens_profile(piecewise(true));
    } else if (args.kind == "tetragon_profile") {
      svg = figure_tetragon_profile(piecewise(false));
    } else if (args.kind == "orbit2d" || args.kind == "orbit3d_projection") {
      if (!table || args.trajectory.empty())
        throw Error(ErrorKind::ConfigError, "figure '" + args.kind + "' needs --table and --traj");
      const Orbit orbit = read_trajectory(args.trajectory);
      if (args.kind == "orbit2d") {
        const auto* p = std::get_if<PlanarTable>(&*table);
        if (!p) throw Error(ErrorKind::ConfigError, "orbit2d needs a planar table");
        svg = figure_orbit2d(*p, orbit);
      } else {
        svg = figure_orbit3d_projection(*table, orbit);
      }
    } else {
      throw Error(ErrorKind::ConfigError, "unknown figure kind '" + args.kind + "'");
    }
    emit(args.out, svg, out);
    return static_cast<int>(kExitOk);
  });
}

int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ConfigFile base = load_config(args.table);
    SimulateArgs sa;
    sa.steps = args.steps;
    sa.integrals = args.integrals;
    sa.seed = args.seed;
    const RunConfig run = merged_run(base, sa);

    std::vector<GridAxis> axes;
    for (const auto& g : args.grid) axes.push_back(parse_axis(g));
    std::size_t n_rows = 1;
    for (const auto& a : axes) n_rows *= a.values.size();

    // integral count fixed by the base table when it is valid
    std::size_t n_integrals = 0;
    try {
      n_integrals = parse_integral_list(run.integrals, build_table(base.table_section)).size();
    } catch (const Error&) {
      n_integrals = 0;
    }

    auto point_of = [&](std::size_t row) {
      std::vector<std::string> vals(axes.size());
      for (std::size_t i = axes.size(); i-- > 0;) {
        vals[i] = axes[i].values[row % axes[i].values.size()];
        row /= axes[i].values.size();
      }
      return vals;
    };

    auto run_row = [&](std::size_t row) {
      SweepRow r;
      try {
        Section sec = base.table_section;
        RunConfig rc = run;
        const auto vals = point_of(row);
        for (std::size_t i = 0; i < axes.size(); ++i) {
          if (axes[i].key == "seed")
            rc.seed = static_cast<std::uint64_t>(std::stod(vals[i]));
          else
            sec.entries[axes[i].key] = {vals[i], 0};
        }
        const Table table = build_table(sec);
        const auto integrals = parse_integral_list(rc.integrals, table);
        StepOptions opts;
        opts.policy = rc.policy;
        const Orbit orbit = propagate(table, initial_condition(table, rc), rc.steps, opts);
        r.termination = std::string(to_string(orbit.termination));
        r.n_impacts = orbit.n_impacts();
        if (orbit.termination != Termination::Completed) r.status = r.termination;
        for (const auto& rep : audit_orbit(orbit, integrals)) r.drifts.push_back(rep.max_rel_drift);
      } catch (const Error& e) {
        r.status = std::string(to_string(e.kind()));
      }
      return r;
    };

    std::vector<SweepRow> rows(n_rows);
    unsigned threads = args.threads > 0 ? static_cast<unsigned>(args.threads) : std::thread::hardware_concurrency();
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n_rows)));
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w)
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n_rows;) rows[i] = run_row(i);
      });
    for (auto& t : pool) t.join();

    std::string csv = "row";
    for (const auto& a : axes) csv += "," + a.key;
    csv += ",status,termination,n_impacts";
    for (const auto& r : rows) n_integrals = std::max(n_integrals, r.drifts.size());
    for (std::size_t i = 1; i <= n_integrals; ++i) csv += ",max_rel_drift_F_" + std::to_string(i);
    csv += '\n';
    for (std::size_t i = 0; i < n_rows; ++i) {
      csv += std::to_string(i);
      for (const auto& v : point_of(i)) csv += "," + v;
      csv += "," + rows[i].status + "," + rows[i].termination + "," + std::to_string(rows[i].n_impacts);
      for (std::size_t k = 0; k < n_integrals; ++k) csv += "," + (k < rows[i].drifts.size() ? g17(rows[i].drifts[k]) : "");
      csv += '\n';
    }
    emit(args.out, csv, out);
    return static_cast<int>(kExitOk);
  });
}

int cmd_table_list(std::ostream& out) {
  for (const auto& k : table_kinds()) {
    out << k.kind << ": " << k.summary << "\n  required:";
    for (const auto& r : k.required) out << ' ' << r;
    if (k.required.empty()) out << " (none)";
    if (!k.optional.empty()) {
      out << "\n  optional:";
      for (const auto& o : k.optional) out << ' ' << o;
    }
    out << '\n';
  }
  return kExitOk;
}

}  // namespace polybill::cli
