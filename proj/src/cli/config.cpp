#include "polybill/cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace polybill::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void config_error(int line, const std::string& msg) {
  throw Error(ErrorKind::ConfigError, (line > 0 ? "line " + std::to_string(line) + ": " : std::string()) + msg);
}

double parse_double(const std::string& text, int line, const std::string& key) {
  const std::string t = trim(text);
  double x = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), x);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
    config_error(line, "key '" + key + "': '" + t + "' is not a number");
  return x;
}

// Splits at commas that are not inside parentheses.
std::vector<std::string> split_top_level(const std::string& text) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char ch : text) {
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (ch == ',' && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
  return out;
}

class KeyReader {
 public:
  KeyReader(const Section& s, const KindInfo& info) : s_(s), info_(info) {
    std::set<std::string> known(info.required.begin(), info.required.end());
    known.insert(info.optional.begin(), info.optional.end());
    known.insert("kind");
    for (const auto& [key, val] : s.entries)
      if (!known.count(key)) config_error(val.second, "unknown key '" + key + "' for table kind '" + info.kind + "'");
    for (const auto& key : info.required)
      if (!s.has(key)) config_error(s.line, "missing key '" + key + "' for table kind '" + info.kind + "'");
  }

  double num(const std::string& key, double fallback = 0.0) const {
    const auto it = s_.entries.find(key);
    if (it == s_.entries.end()) return fallback;
    return parse_double(it->second.first, it->second.second, key);
  }
  int integer(const std::string& key) const {
    const double x = num(key);
    if (x != std::floor(x)) config_error(line(key), "key '" + key + "' must be an integer");
    return static_cast<int>(x);
  }
  std::vector<double> list(const std::string& key) const {
    const auto it = s_.entries.find(key);
    if (it == s_.entries.end()) return {};
    std::vector<double> out;
    for (const auto& part : split_top_level(it->second.first)) out.push_back(parse_double(part, line(key), key));
    return out;
  }
  std::string text(const std::string& key, const std::string& fallback) const {
    const auto it = s_.entries.find(key);
    return it == s_.entries.end() ? fallback : trim(it->second.first);
  }
  bool has(const std::string& key) const { return s_.has(key); }
  int line(const std::string& key) const {
    const auto it = s_.entries.find(key);
    return it == s_.entries.end() ? s_.line : it->second.second;
  }

 private:
  const Section& s_;
  const KindInfo& info_;
};

const KindInfo& kind_info(const std::string& kind, int line) {
  for (const auto& k : table_kinds())
    if (k.kind == kind) return k;
  config_error(line, "unknown table kind '" + kind + "'");
}

}  // namespace

std::vector<Section> parse_sections(const std::string& text) {
  std::vector<Section> out;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']' || s.size() < 3) config_error(line, "malformed section header '" + s + "'");
      const std::string name = trim(s.substr(1, s.size() - 2));
      for (const auto& sec : out)
        if (sec.name == name) config_error(line, "duplicate section [" + name + "]");
      out.push_back({name, line, {}});
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) config_error(line, "expected 'key = value', got '" + s + "'");
    if (out.empty()) config_error(line, "key outside of a section");
    const std::string key = trim(s.substr(0, eq));
    if (key.empty()) config_error(line, "empty key");
    if (out.back().has(key)) config_error(line, "duplicate key '" + key + "'");
    out.back().entries[key] = {trim(s.substr(eq + 1)), line};
  }
  return out;
}

const std::vector<KindInfo>& table_kinds() {
  static const std::vector<KindInfo> kinds{
      {"circle", {"r"}, {"cx", "cy"}, "disk of radius r centred at (cx, cy)"},
      {"ellipse", {"a2", "lambda"}, {}, "x^2/a2 + y^2/(a2 - lambda) <= 1, a2 > lambda"},
      {"hyperbola", {"a2", "lambda"}, {}, "convex side of the right branch x^2/a2 + y^2/(a2 - lambda) = 1, a2 < lambda"},
      {"parabola", {"p", "lambda"}, {}, "y^2 <= p^2 - 2 p lambda + 2 p x"},
      {"exp_wire", {"n", "gamma0"}, {"upper", "frequencies", "period"}, "curve exp(A t) gamma0, A given by its upper triangle or rotation frequencies"},
      {"spiral", {"R", "a"}, {}, "helix (R sin t, R cos t, a t)"},
      {"toric_knot", {"a", "b", "k", "m"}, {}, "(a e^{ikt}, b e^{imt}) in R^4"},
      {"arctan_surface", {"alpha", "beta"}, {"f_slope", "f_offset", "side", "chart"}, "z = -(beta/alpha) atan2(x, y) + f(x^2 + y^2), f linear"},
      {"parabolic_lens", {"b", "c", "s1", "s2"}, {}, "solid between two confocal paraboloids"},
      {"tetragon_torus", {}, {"a", "b", "c", "s_e1", "s_e2", "s_h1", "s_h2"}, "solid torus from a tetragon of confocal conics"},
  };
  return kinds;
}

Table build_table(const Section& section) {
  if (!section.has("kind")) config_error(section.line, "missing key 'kind'");
  const auto& [kind, kind_line] = section.entries.at("kind");
  const KindInfo& info = kind_info(kind, kind_line);
  const KeyReader k(section, info);

  if (kind == "circle") return PlanarTable::circle(Vec2(k.num("cx"), k.num("cy")), k.num("r"));
  if (kind == "ellipse" || kind == "hyperbola") {
    const double a2 = k.num("a2"), lambda = k.num("lambda");
    if (kind == "ellipse" && !(a2 > lambda)) config_error(k.line("lambda"), "ellipse needs a2 > lambda");
    if (kind == "hyperbola" && !(a2 < lambda)) config_error(k.line("lambda"), "hyperbola needs a2 < lambda");
    return PlanarTable::conic(a2, lambda);
  }
  if (kind == "parabola") return PlanarTable::parabola(k.num("p"), k.num("lambda"));
  if (kind == "exp_wire") {
    const int n = k.integer("n");
    if (n < 2) config_error(k.line("n"), "key 'n' must be at least 2");
    std::optional<SkewMatrix> a;
    if (k.has("upper") == k.has("frequencies"))
      config_error(section.line, "exp_wire needs exactly one of 'upper' or 'frequencies'");
    if (k.has("upper")) {
      const auto upper = k.list("upper");
      if (static_cast<int>(upper.size()) != n * (n - 1) / 2)
        config_error(k.line("upper"), "key 'upper' needs n(n-1)/2 = " + std::to_string(n * (n - 1) / 2) + " entries");
      a = SkewMatrix::from_upper(n, upper);
    } else {
      const auto freq = k.list("frequencies");
      if (static_cast<int>(2 * freq.size()) != n)
        config_error(k.line("frequencies"), "key 'frequencies' needs n/2 entries");
      a = SkewMatrix::rotation_blocks(freq);
    }
    const auto g = k.list("gamma0");
    if (static_cast<int>(g.size()) != n) config_error(k.line("gamma0"), "key 'gamma0' needs n entries");
    std::optional<double> period;
    if (k.has("period")) period = k.num("period");
    return WireTable::exp_wire(*a, Eigen::Map<const Vec>(g.data(), n), period);
  }
  if (kind == "spiral") return WireTable::spiral(k.num("R"), k.num("a"));
  if (kind == "toric_knot") return WireTable::toric_knot(k.num("a"), k.num("b"), k.integer("k"), k.integer("m"));
  if (kind == "arctan_surface") {
    const std::string side = k.text("side", "below"), chart = k.text("chart", "half_plane");
    if (side != "below" && side != "above") config_error(k.line("side"), "key 'side' must be below or above");
    if (chart != "half_plane" && chart != "slit_plane")
      config_error(k.line("chart"), "key 'chart' must be half_plane or slit_plane");
    return ArctanSurface(k.num("alpha"), k.num("beta"), ScalarProfile::linear(k.num("f_slope", 1.0), k.num("f_offset")),
                         chart == "half_plane" ? ArctanSurface::Chart::HalfPlane : ArctanSurface::Chart::SlitPlane,
                         side == "below" ? -1 : 1);
  }
  if (kind == "parabolic_lens") return make_parabolic_lens(k.num("b"), k.num("c"), k.num("s1"), k.num("s2"));
  return make_tetragon_torus(k.num("a", 1.0), k.num("b", 0.0), k.num("c", 1.0), k.num("s_e1", 1.0), k.num("s_e2", 2.0),
                             k.num("s_h1", -0.25), k.num("s_h2", -0.5));
}

std::vector<double> parse_number_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  for (const auto& part : split_top_level(text)) out.push_back(parse_double(part, 0, what));
  if (out.empty()) config_error(0, "'" + what + "' is empty");
  return out;
}

BranchPolicy parse_policy(const std::string& text) {
  if (text == "forward") return BranchPolicy::Forward;
  if (text == "nearest") return BranchPolicy::Nearest;
  config_error(0, "policy must be forward or nearest, got '" + text + "'");
}

ConfigFile parse_config(const std::string& text) {
  const auto sections = parse_sections(text);
  ConfigFile cfg;
  bool have_table = false;
  for (const auto& s : sections) {
    if (s.name == "table") {
      cfg.table_section = s;
      have_table = true;
    } else if (s.name == "run") {
      static const std::set<std::string> keys{"x0", "v0", "chord", "steps", "integrals", "policy", "seed"};
      for (const auto& [key, val] : s.entries) {
        const auto& [value, line] = val;
        if (!keys.count(key)) config_error(line, "unknown key '" + key + "' in [run]");
        try {
          if (key == "x0") cfg.run.x0 = parse_number_list(value, key);
          if (key == "v0") cfg.run.v0 = parse_number_list(value, key);
          if (key == "chord") cfg.run.chord = parse_number_list(value, key);
          if (key == "integrals") cfg.run.integrals = value;
          if (key == "policy") cfg.run.policy = parse_policy(value);
          if (key == "steps" || key == "seed") {
            const double x = parse_double(value, line, key);
            if (x < 0 || x != std::floor(x)) config_error(line, "key '" + key + "' must be a non-negative integer");
            if (key == "steps") cfg.run.steps = static_cast<int>(x);
            else cfg.run.seed = static_cast<std::uint64_t>(x);
          }
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::ConfigError || std::string(e.what()).rfind("line", 0) == 0) throw;
          config_error(line, e.what());
        }
      }
    } else {
      config_error(s.line, "unknown section [" + s.name + "]");
    }
  }
  if (!have_table) config_error(0, "no [table] section");
  if (!cfg.table_section.has("kind")) config_error(cfg.table_section.line, "missing key 'kind'");
  cfg.kind = cfg.table_section.entries.at("kind").first;
  return cfg;
}

ConfigFile load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::vector<IntegralSpec> parse_integral_list(const std::string& text, const Table* table) {
  const std::string t = trim(text);
  if (t.empty() || t == "natural") {
    if (!table) config_error(0, "'natural' integrals need a table");
    return natural_integrals(*table);
  }
  std::vector<IntegralSpec> out;
  for (const auto& item : split_top_level(t)) {
    if (item == "M3") {
      out.push_back(AxialDeg1{1.0, 0.0});
      continue;
    }
    if (item == "wire") {
      const auto* w = table ? std::get_if<WireTable>(table) : nullptr;
      if (!w) config_error(0, "integral 'wire' needs a wire table");
      out.push_back(wire_integral(*w));
      continue;
    }
    const auto open = item.find('(');
    if (open == std::string::npos || item.back() != ')') config_error(0, "malformed integral '" + item + "'");
    const std::string name = trim(item.substr(0, open));
    const auto args = parse_number_list(item.substr(open + 1, item.size() - open - 2), item);
    auto need = [&](std::size_t n) {
      if (args.size() != n)
        config_error(0, "integral '" + name + "' takes " + std::to_string(n) + " parameters, got " +
                            std::to_string(args.size()));
    };
    if (name == "planar_deg1") {
      need(2);
      out.push_back(PlanarDeg1{args[0], args[1]});
    } else if (name == "parabola") {
      need(1);
      out.push_back(ParabolaIntegral{args[0]});
    } else if (name == "conic") {
      need(1);
      out.push_back(ConicIntegral{args[0]});
    } else if (name == "axial") {
      need(2);
      out.push_back(AxialDeg1{args[0], args[1]});
    } else if (name == "degree2") {
      need(3);
      out.push_back(Degree2Axial{args[0], args[1], args[2]});
    } else if (name == "linear_momentum") {
      const int n = static_cast<int>(args[0]);
      if (n < 2 || args[0] != n) config_error(0, "linear_momentum: first parameter is the dimension");
      need(1 + static_cast<std::size_t>(n * (n - 1) / 2 + n));
      const std::vector<double> upper(args.begin() + 1, args.begin() + 1 + n * (n - 1) / 2);
      Vec b(n);
      for (int i = 0; i < n; ++i) b[i] = args[1 + n * (n - 1) / 2 + i];
      out.push_back(LinearMomentum{SkewMatrix::from_upper(n, upper), b});
    } else {
      config_error(0, "unknown integral '" + name + "'");
    }
  }
  return out;
}

}  // namespace polybill::cli
