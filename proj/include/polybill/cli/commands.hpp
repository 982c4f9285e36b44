#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace polybill::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitDynamics = 3,
  kExitVerify = 4,
};

/// Command-line values; unset fields fall back to the [run] section of the
/// table file, then to the defaults.
struct SimulateArgs {
  std::string table;
  std::optional<std::vector<double>> x0;
  std::optional<std::vector<double>> v0;
  std::optional<std::vector<double>> chord;
  std::optional<int> steps;
  std::optional<std::string> integrals;
  std::optional<std::string> policy;
  std::optional<std::uint64_t> seed;
  std::string out;  ///< empty: stdout
};

struct VerifyArgs {
  std::string trajectory;
  std::string table;  ///< needed only for "natural" or "wire"
  std::string integrals = "natural";
  double threshold = 1e-9;
  std::string out;
};

struct OdeCheckArgs {
  std::string table;
  int samples = 1000;
  std::uint64_t seed = 0;
  double threshold = 1e-10;
  std::string out;
};

struct FigureArgs {
  std::string kind;
  std::string table;       ///< optional for the profile kinds
  std::string trajectory;  ///< orbit kinds
  std::string out;
};

struct SweepArgs {
  std::string table;
  std::vector<std::string> grid;  ///< "key=v1,v2,..."; key may be a table key or "seed"
  std::optional<int> steps;
  std::optional<std::string> integrals;
  std::optional<std::uint64_t> seed;
  int threads = 0;  ///< 0: hardware concurrency
  std::string out;
};

// Each returns an exit code; diagnostics go to `err`, results to the
// output file or `out`.
int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err);
int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err);
int cmd_ode_check(const OdeCheckArgs& args, std::ostream& out, std::ostream& err);
int cmd_figure(const FigureArgs& args, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err);
int cmd_table_list(std::ostream& out);

}  // namespace polybill::cli
