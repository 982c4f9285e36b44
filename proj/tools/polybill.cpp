// polybill: simulate and audit billiards with polynomial integrals.

#include <iostream>

#include <CLI11.hpp>

#include "polybill/cli/commands.hpp"
#include "polybill/cli/config.hpp"

using namespace polybill::cli;

namespace {

// CSV list option stored as text, parsed after CLI11 has run.
struct ListOpt {
  std::string text;
  std::optional<std::vector<double>> get(const std::string& name) const {
    if (text.empty()) return std::nullopt;
    return parse_number_list(text, name);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Billiards with polynomial integrals: simulation, conservation audits, figures"};
  app.require_subcommand(1);

  SimulateArgs sim;
  ListOpt x0, v0, chord;
  int steps = -1;
  std::string integrals, policy;
  std::uint64_t seed = 0;
  auto* simulate = app.add_subcommand("simulate", "propagate an orbit and write its trajectory CSV");
  simulate->add_option("--table", sim.table, "table config file")->required();
  simulate->add_option("--x0", x0.text, "initial position, comma separated");
  simulate->add_option("--v0", v0.text, "initial velocity, comma separated (normalized)");
  simulate->add_option("--chord", chord.text, "initial wire chord s,t");
  simulate->add_option("--steps", steps, "number of reflections");
  simulate->add_option("--integrals", integrals, "integral list, default natural");
  simulate->add_option("--policy", policy, "wire branch policy: forward|nearest");
  auto* sim_seed = simulate->add_option("--seed", seed, "seed for the random initial condition");
  simulate->add_option("--out", sim.out, "output CSV (default stdout)");

  VerifyArgs ver;
  auto* verify = app.add_subcommand("verify", "audit integral conservation along a trajectory CSV");
  verify->add_option("--traj", ver.trajectory, "trajectory CSV")->required();
  verify->add_option("--table", ver.table, "table config (for natural integrals)");
  verify->add_option("--integrals", ver.integrals, "integral list");
  verify->add_option("--threshold", ver.threshold, "max relative drift for pass");
  verify->add_option("--out", ver.out, "output JSON (default stdout)");

  OdeCheckArgs ode;
  auto* ode_check = app.add_subcommand("ode-check", "residuals of the integrability equations on a table");
  ode_check->add_option("--table", ode.table, "table config file")->required();
  ode_check->add_option("--samples", ode.samples, "sample points per piece");
  ode_check->add_option("--seed", ode.seed, "sampling seed");
  ode_check->add_option("--threshold", ode.threshold, "max residual for pass");
  ode_check->add_option("--out", ode.out, "output CSV (default stdout)");

  FigureArgs fig;
  auto* figure = app.add_subcommand("figure", "write an SVG figure");
  figure->add_option("kind", fig.kind, "parabolic_lens_profile|tetragon_profile|orbit2d|orbit3d_projection")
      ->required();
  figure->add_option("--table", fig.table, "table config file");
  figure->add_option("--traj", fig.trajectory, "trajectory CSV for orbit figures");
  figure->add_option("--out", fig.out, "output SVG (default stdout)");

  SweepArgs sw;
  int sw_steps = -1;
  std::string sw_integrals;
  std::uint64_t sw_seed = 0;
  auto* sweep = app.add_subcommand("sweep", "run a parameter grid and tabulate drifts");
  sweep->add_option("--table", sw.table, "base table config file")->required();
  sweep->add_option("--grid", sw.grid, "axis key=v1,v2,... (repeatable)");
  sweep->add_option("--steps", sw_steps, "reflections per row");
  sweep->add_option("--integrals", sw_integrals, "integral list");
  auto* sw_seed_opt = sweep->add_option("--seed", sw_seed, "initial condition seed");
  sweep->add_option("--threads", sw.threads, "worker threads (0: all cores)");
  sweep->add_option("--out", sw.out, "output CSV (default stdout)");

  auto* table = app.add_subcommand("table", "table catalogue");
  table->require_subcommand(1);
  auto* table_list = table->add_subcommand("list", "list table kinds and their keys");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*simulate) {
      sim.x0 = x0.get("x0");
      sim.v0 = v0.get("v0");
      sim.chord = chord.get("chord");
      if (steps >= 0) sim.steps = steps;
      if (!integrals.empty()) sim.integrals = integrals;
      if (!policy.empty()) sim.policy = policy;
      if (*sim_seed) sim.seed = seed;
      return cmd_simulate(sim, std::cout, std::cerr);
    }
    if (*verify) return cmd_verify(ver, std::cout, std::cerr);
    if (*ode_check) return cmd_ode_check(ode, std::cout, std::cerr);
    if (*figure) return cmd_figure(fig, std::cout, std::cerr);
    if (*sweep) {
      if (sw_steps >= 0) sw.steps = sw_steps;
      if (!sw_integrals.empty()) sw.integrals = sw_integrals;
      if (*sw_seed_opt) sw.seed = sw_seed;
      return cmd_sweep(sw, std::cout, std::cerr);
    }
    if (*table_list) return cmd_table_list(std::cout);
  } catch (const polybill::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}
