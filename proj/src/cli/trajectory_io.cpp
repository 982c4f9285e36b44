#include "polybill/cli/trajectory_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

namespace polybill::cli {

namespace {

void put(std::string& out, double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  out += buf;
}

[[noreturn]] void schema_error(const std::string& msg) { throw Error(ErrorKind::SchemaMismatch, msg); }

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

int param_columns(const Table& table) { return std::holds_alternative<PlanarTable>(table) ? 1 : 2; }

std::string format_trajectory(const Orbit& orbit, int n_params, const std::vector<IntegralSpec>& integrals) {
  const Eigen::Index n = orbit.states.empty() ? 0 : orbit.states.front().x.size();
  std::string out = "step";
  for (int i = 1; i <= n_params; ++i) out += ",param" + std::to_string(i);
  for (Eigen::Index i = 1; i <= n; ++i) out += ",x" + std::to_string(i);
  for (Eigen::Index i = 1; i <= n; ++i) out += ",v" + std::to_string(i);
  for (std::size_t i = 1; i <= integrals.size(); ++i) out += ",F_" + std::to_string(i);
  out += '\n';
  for (std::size_t k = 0; k < orbit.states.size(); ++k) {
    out += std::to_string(k);
    const BoundaryParam& p = orbit.params[k];
    const double params[2] = {p.p1, p.p2};
    for (int i = 0; i < n_params; ++i) {
      out += ',';
      put(out, params[i]);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      out += ',';
      put(out, orbit.states[k].x[i]);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      out += ',';
      put(out, orbit.states[k].v[i]);
    }
    for (const auto& spec : integrals) {
      out += ',';
      put(out, eval_integral(spec, orbit.states[k]));
    }
    out += '\n';
  }
  return out;
}

Orbit parse_trajectory(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) schema_error("empty trajectory file");
  const auto header = split(line);
  std::size_t i = 0;
  if (header.empty() || header[0] != "step") schema_error("first column must be 'step'");
  ++i;
  int n_params = 0;
  while (i < header.size() && header[i] == "param" + std::to_string(n_params + 1)) ++n_params, ++i;
  int n = 0;
  while (i < header.size() && header[i] == "x" + std::to_string(n + 1)) ++n, ++i;
  for (int j = 1; j <= n; ++j, ++i)
    if (i >= header.size() || header[i] != "v" + std::to_string(j)) schema_error("expected column v" + std::to_string(j));
  int k = 0;
  while (i < header.size() && header[i] == "F_" + std::to_string(k + 1)) ++k, ++i;
  if (i != header.size()) schema_error("unexpected column '" + header[i] + "'");
  if (n_params < 1 || n_params > 2 || n < 2) schema_error("header does not match step,param1[,param2],x..,v..,F..");

  Orbit orbit;
  const std::size_t width = header.size();
  int row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != width)
      schema_error("row " + std::to_string(row) + " has " + std::to_string(cells.size()) + " cells, expected " +
                   std::to_string(width));
    std::vector<double> vals(width);
    for (std::size_t c = 0; c < width; ++c) {
      char* end = nullptr;
      vals[c] = std::strtod(cells[c].c_str(), &end);
      if (cells[c].empty() || *end != '\0') schema_error("row " + std::to_string(row) + ": bad number '" + cells[c] + "'");
    }
    if (vals[0] != row) schema_error("step column out of sequence at row " + std::to_string(row));
    BoundaryParam p;
    p.p1 = vals[1];
    if (n_params == 2) p.p2 = vals[2];
    PhaseState s{Vec(n), Vec(n)};
    for (int j = 0; j < n; ++j) {
      s.x[j] = vals[1 + n_params + j];
      s.v[j] = vals[1 + n_params + n + j];
    }
    orbit.states.push_back(std::move(s));
    orbit.params.push_back(p);
    ++row;
  }
  return orbit;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Orbit read_trajectory(const std::string& path) { return parse_trajectory(read_file(path)); }

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::ConfigError, "cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw Error(ErrorKind::ConfigError, "write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error(ErrorKind::ConfigError, "cannot rename onto '" + path + "': " + ec.message());
  }
}

}  // namespace polybill::cli
