#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include <json.hpp>
#include <unistd.h>

#include "polybill/cli/commands.hpp"
#include "polybill/cli/config.hpp"
#include "polybill/cli/svg.hpp"
#include "polybill/cli/trajectory_io.hpp"

using namespace polybill;
using namespace polybill::cli;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("polybill_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name, const std::string& content = "") const {
    const auto p = (path / name).string();
    if (!content.empty()) write_atomic(p, content);
    return p;
  }
};

std::string config_error(const std::string& text) {
  try {
    parse_config(text);
    build_table(parse_config(text).table_section);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ConfigError);
    return e.what();
  }
  FAIL("no error");
  return {};
}

const char* kCircle = "[table]\nkind = circle\nr = 1\n[run]\nx0 = 0.1, 0.2\nv0 = 0.6, 0.8\nsteps = 10\n";

}  // namespace

TEST_CASE("config errors carry line numbers") {
  CHECK(config_error("[table]\nkind = circle\nradius = 1\n").find("line 3") != std::string::npos);
  CHECK(config_error("[table]\nkind = circle\nradius = 1\n").find("radius") != std::string::npos);
  CHECK(config_error("[table]\nkind = ellipse\na2 = 2\n").find("lambda") != std::string::npos);
  CHECK(config_error("kind = circle\n").find("line 1") != std::string::npos);
  CHECK(config_error("[table]\nkind = circle\nr = 1\nr = 2\n").find("line 4") != std::string::npos);
  CHECK(config_error("[table]\nkind = circle\nr = 1\n[extra]\n").find("line 4") != std::string::npos);
  CHECK(config_error("[table]\nkind = blob\n").find("blob") != std::string::npos);
}

TEST_CASE("config parses run settings and integral lists") {
  const auto cfg = parse_config(std::string(kCircle) + "# comment\npolicy = nearest\nseed = 7\n");
  CHECK(cfg.kind == "circle");
  CHECK(cfg.run.steps == 10);
  CHECK(cfg.run.policy == BranchPolicy::Nearest);
  CHECK(cfg.run.seed == 7);
  REQUIRE(cfg.run.x0);
  CHECK((*cfg.run.x0)[1] == 0.2);
  const auto specs = parse_integral_list("M3, degree2(0,2,1),axial(1.5,-0.8)", nullptr);
  REQUIRE(specs.size() == 3);
  CHECK(integral_id(specs[0]) == "axial(1,0)");
  CHECK(integral_id(specs[1]) == "degree2(0,2,1)");
  CHECK(integral_id(specs[2]) == "axial(1.5,-0.8)");
  CHECK_THROWS_AS(parse_integral_list("bogus(1)", nullptr), Error);
  CHECK(table_kinds().size() == 10);
}

TEST_CASE("simulate writes one row per state with unit velocities") {
  TempDir dir;
  const auto table = dir.file("c.ini", kCircle);
  const auto out = dir.file("o.csv");
  std::ostringstream so, se;
  SimulateArgs args;
  args.table = table;
  args.out = out;
  REQUIRE(cmd_simulate(args, so, se) == kExitOk);
  const auto orbit = read_trajectory(out);
  CHECK(orbit.states.size() == 11);
  for (const auto& s : orbit.states) CHECK(std::abs(s.v.norm() - 1.0) <= 1e-12);

  // csv round trip matches the in-memory audit
  const auto cfg = load_config(table);
  const Table t = build_table(cfg.table_section);
  const Orbit mem = propagate(t, PhaseState{Vec2(0.1, 0.2), Vec2(0.6, 0.8)}, 10);
  const auto specs = natural_integrals(t);
  const auto a = audit_orbit(orbit, specs), b = audit_orbit(mem, specs);
  REQUIRE(a[0].series.size() == b[0].series.size());
  for (std::size_t i = 0; i < a[0].series.size(); ++i) CHECK(std::abs(a[0].series[i] - b[0].series[i]) <= 1e-15);

  // deterministic bytes
  const auto out2 = dir.file("o2.csv");
  args.out = out2;
  REQUIRE(cmd_simulate(args, so, se) == kExitOk);
  CHECK(read_file(out) == read_file(out2));
}

TEST_CASE("verify passes and fails as it should") {
  TempDir dir;
  const auto table = dir.file("c.ini", kCircle);
  const auto traj = dir.file("o.csv");
  std::ostringstream so, se;
  SimulateArgs sim;
  sim.table = table;
  sim.out = traj;
  REQUIRE(cmd_simulate(sim, so, se) == kExitOk);

  VerifyArgs v;
  v.trajectory = traj;
  v.table = table;
  std::ostringstream good;
  CHECK(cmd_verify(v, good, se) == kExitOk);
  const auto j = nlohmann::json::parse(good.str());
  CHECK(j["pass"] == true);
  CHECK(j["n_impacts"] == 10);

  // the circle is not symmetric about a shifted center
  v.integrals = "planar_deg1(0.5,0.5)";
  std::ostringstream bad;
  CHECK(cmd_verify(v, bad, se) == kExitVerify);
  CHECK(nlohmann::json::parse(bad.str())["pass"] == false);

  // header only
  const std::string header = read_file(traj).substr(0, read_file(traj).find('\n') + 1);
  v.trajectory = dir.file("empty.csv", header);
  v.integrals = "natural";
  std::ostringstream empty;
  CHECK(cmd_verify(v, empty, se) == kExitVerify);
  CHECK(nlohmann::json::parse(empty.str())["pass"] == false);

  v.trajectory = dir.file("broken.csv", "step,x\n0,1\n");
  std::ostringstream broken;
  CHECK(cmd_verify(v, broken, se) == kExitConfig);
}

TEST_CASE("trajectory parser rejects malformed input") {
  CHECK_THROWS_AS(parse_trajectory(""), Error);
  CHECK_THROWS_AS(parse_trajectory("step,param1,x1,x2,v1,v2\n0,nan,1,2,3\n"), Error);
  CHECK_THROWS_AS(parse_trajectory("step,param1,x1,x2,v1,v2\n0,nan,1,2,3,abc\n"), Error);
}

TEST_CASE("sweep covers the grid and flags invalid rows") {
  TempDir dir;
  const auto table =
      dir.file("lens.ini", "[table]\nkind = parabolic_lens\nb = 2\nc = 1\ns1 = 1\ns2 = -0.5\n[run]\nsteps = 20\n");
  std::ostringstream so, se;
  SweepArgs args;
  args.table = table;
  args.grid = {"s1=0.8,1,1.2", "seed=1,2,3"};
  args.threads = 3;
  args.out = dir.file("sweep.csv");
  REQUIRE(cmd_sweep(args, so, se) == kExitOk);
  std::istringstream in(read_file(args.out));
  std::string line;
  int rows = -1;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 9);

  args.grid = {"s2=-0.5,0.5"};
  args.out = dir.file("sweep2.csv");
  cmd_sweep(args, so, se);
  CHECK(read_file(args.out).find("EmptyRegion") != std::string::npos);

  // a single point agrees with simulate + verify
  args.grid = {"seed=5"};
  args.threads = 1;
  args.out = dir.file("one.csv");
  REQUIRE(cmd_sweep(args, so, se) == kExitOk);
  SimulateArgs sim;
  sim.table = table;
  sim.seed = 5;
  sim.out = dir.file("one_traj.csv");
  cmd_simulate(sim, so, se);
  VerifyArgs v;
  v.trajectory = sim.out;
  v.table = table;
  std::ostringstream js;
  cmd_verify(v, js, se);
  const auto arr = nlohmann::json::parse(js.str());
  const std::string sweep = read_file(args.out);
  const std::string row = sweep.substr(sweep.find('\n') + 1);
  std::vector<std::string> cells;
  std::stringstream ss(row);
  for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
  REQUIRE(cells.size() >= 7);
  CHECK(std::stoul(cells[4]) == arr[0]["n_impacts"].get<std::size_t>());
  CHECK(std::stod(cells[5]) == doctest::Approx(arr[0]["max_rel_drift"].get<double>()).epsilon(1e-12));
}

TEST_CASE("figures are deterministic and mark the lens edge") {
  TempDir dir;
  std::ostringstream so, se;
  FigureArgs f;
  f.kind = "parabolic_lens_profile";
  f.out = dir.file("a.svg");
  REQUIRE(cmd_figure(f, so, se) == kExitOk);
  f.out = dir.file("b.svg");
  REQUIRE(cmd_figure(f, so, se) == kExitOk);
  CHECK(read_file(dir.file("a.svg")) == read_file(f.out));
  CHECK(read_file(f.out).rfind("<svg", 0) == 0);

  // edge at R = 1/sqrt(2), z = 0.75
  const auto lens = std::get<PiecewiseSurfaceTable>(build_table(
      parse_config("[table]\nkind = parabolic_lens\nb = 2\nc = 1\ns1 = 1\ns2 = -0.5\n").table_section));
  REQUIRE(lens.edges().size() == 1);
  CHECK(lens.edges()[0].radius == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(lens.edges()[0].height == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(read_file(f.out).find("<circle") != std::string::npos);

  f.kind = "tetragon_profile";
  f.out = dir.file("t.svg");
  CHECK(cmd_figure(f, so, se) == kExitOk);
  f.kind = "nonsense";
  CHECK(cmd_figure(f, so, se) == kExitConfig);
}

TEST_CASE("ode-check exits by threshold") {
  TempDir dir;
  std::ostringstream so, se;
  OdeCheckArgs a;
  a.table = dir.file("e.ini", "[table]\nkind = ellipse\na2 = 2\nlambda = 1\n");
  a.out = dir.file("r.csv");
  CHECK(cmd_ode_check(a, so, se) == kExitOk);
  CHECK(read_file(a.out).rfind("piece,t,residual", 0) == 0);
  a.table = dir.file("l.ini", "[table]\nkind = parabolic_lens\nb = 2\nc = 1\ns1 = 1\ns2 = -0.5\n");
  CHECK(cmd_ode_check(a, so, se) == kExitOk);
}
