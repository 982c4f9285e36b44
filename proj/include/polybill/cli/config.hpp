#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "polybill/dynamics.hpp"
#include "polybill/integrals.hpp"
#include "polybill/tables.hpp"

namespace polybill::cli {

/// key -> (value, line) of one section.
struct Section {
  std::string name;
  int line = 0;
  std::map<std::string, std::pair<std::string, int>> entries;

  bool has(const std::string& key) const { return entries.count(key) > 0; }
};

/// Flat INI-like text: `[section]` headers, `key = value` lines, `#` comments.
std::vector<Section> parse_sections(const std::string& text);

/// Run settings; every field may be overridden from the command line.
struct RunConfig {
  std::optional<std::vector<double>> x0;
  std::optional<std::vector<double>> v0;
  std::optional<std::vector<double>> chord;
  int steps = 100;
  std::string integrals = "natural";
  BranchPolicy policy = BranchPolicy::Forward;
  std::uint64_t seed = 0;
};

struct ConfigFile {
  std::string kind;
  Section table_section;
  RunConfig run;
};

ConfigFile parse_config(const std::string& text);
ConfigFile load_config(const std::string& path);

/// Builds the table of `section` (kind plus its keys). Unknown or missing
/// keys raise ConfigError naming the key and its line; geometry errors from
/// the constructors pass through unchanged.
Table build_table(const Section& section);

/// Table kinds with their keys, for `table list`.
struct KindInfo {
  std::string kind;
  std::vector<std::string> required;
  std::vector<std::string> optional;
  std::string summary;
};
const std::vector<KindInfo>& table_kinds();

/// "natural", or a comma list of ids such as "axial(1,0),degree2(0,2,1)";
/// "M3" and "wire" are shorthands for axial(1,0) and the wire's own integral.
/// `table` may be null when only explicit ids are given.
std::vector<IntegralSpec> parse_integral_list(const std::string& text, const Table* table);
inline std::vector<IntegralSpec> parse_integral_list(const std::string& text, const Table& table) {
  return parse_integral_list(text, &table);
}

std::vector<double> parse_number_list(const std::string& text, const std::string& what);
BranchPolicy parse_policy(const std::string& text);

}  // namespace polybill::cli
