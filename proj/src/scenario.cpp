#include "symlorentz/scenario.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace symlorentz {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto p = s.find(sep, start);
    out.push_back(trim(s.substr(start, p == std::string_view::npos ? p : p - start)));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

struct Entry {
  std::string value;
  std::size_t line;
};

using Section = std::map<std::string, Entry>;

// Typed readers for one entry; each throws ConfigError naming the key.
class Reader {
 public:
  Reader(const std::string& section, const std::string& key, const Entry& e)
      : section_(section), key_(key), e_(e) {}

  [[noreturn]] void fail(const std::string& why) const {
    throw ConfigError(fmt::format("line {}: [{}] {}: {}", e_.line, section_, key_, why), e_.line,
                      key_);
  }

  double number(std::string_view s) const {
    double x = 0.0;
    const char* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, x);
    if (s.empty() || ec != std::errc() || p != end)
      fail(fmt::format("expected a number, got '{}'", s));
    return x;
  }

  double real() const {
    const double x = number(trim(e_.value));
    if (!std::isfinite(x)) fail("value must be finite");
    return x;
  }

  double positive() const {
    const double x = real();
    if (!(x > 0.0)) fail(fmt::format("must be positive, got {}", x));
    return x;
  }

  std::uint64_t unsigned_int() const {
    const std::string_view s = trim(e_.value);
    std::uint64_t x = 0;
    const char* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, x);
    if (s.empty() || ec != std::errc() || p != end)
      fail(fmt::format("expected a non-negative integer, got '{}'", s));
    return x;
  }

  bool boolean() const {
    const std::string_view s = trim(e_.value);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    fail(fmt::format("expected true or false, got '{}'", s));
  }

  Vec3d vec(std::string_view s) const {
    const auto parts = split(s, ',');
    if (parts.size() != 3) fail(fmt::format("expected three comma-separated numbers, got '{}'", s));
    return {number(parts[0]), number(parts[1]), number(parts[2])};
  }

  Vec3d vec() const { return vec(trim(e_.value)); }

  std::vector<Vec3d> vec_list() const {
    std::vector<Vec3d> out;
    for (auto part : split(e_.value, ';'))
      if (!part.empty()) out.push_back(vec(part));
    if (out.empty()) fail("expected at least one vector");
    return out;
  }

  std::vector<double> real_list() const {
    std::vector<double> out;
    for (auto part : split(e_.value, ',')) out.push_back(number(part));
    return out;
  }

  std::string text() const { return std::string(trim(e_.value)); }

 private:
  const std::string& section_;
  const std::string& key_;
  const Entry& e_;
};

using Handler = std::function<void(const Reader&)>;

void apply(const std::string& name, const Section& sec, const std::map<std::string, Handler>& handlers) {
  for (const auto& [key, entry] : sec) {
    auto it = handlers.find(key);
    Reader r(name, key, entry);
    if (it == handlers.end()) r.fail("unknown key");
    it->second(r);
  }
}

std::map<std::string, Handler> param_handlers(SymmetryParams& p) {
  return {
      {"h11", [&](const Reader& r) { p.h11 = r.real(); }},
      {"h12", [&](const Reader& r) { p.h12 = r.real(); }},
      {"h23", [&](const Reader& r) { p.h23 = r.real(); }},
      {"h31", [&](const Reader& r) { p.h31 = r.real(); }},
      {"h1", [&](const Reader& r) { p.h1 = r.real(); }},
      {"h2", [&](const Reader& r) { p.h2 = r.real(); }},
      {"h3", [&](const Reader& r) { p.h3 = r.real(); }},
      {"c", [&](const Reader& r) { p.c = r.real(); }},
      {"h0", [&](const Reader& r) { p.h0 = r.real(); }},
  };
}

}  // namespace

Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir) {
  std::map<std::string, Section> sections;
  std::string current;
  std::size_t lineno = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  const std::set<std::string> known{"params", "functions", "run", "flow"};
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = raw;
    if (const auto c = line.find('#'); c != std::string_view::npos) line = line.substr(0, c);
    line = trim(line);
    // ';' separates vectors in lists, so it only starts a comment at the
    // beginning of a line.
    if (!line.empty() && line.front() == ';') continue;
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(fmt::format("line {}: unterminated section header", lineno), lineno);
      current = std::string(trim(line.substr(1, line.size() - 2)));
      if (!known.count(current))
        throw ConfigError(fmt::format("line {}: unknown section [{}]", lineno, current), lineno, current);
      sections[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(fmt::format("line {}: expected key = value", lineno), lineno);
    const std::string key(trim(line.substr(0, eq)));
    if (current.empty())
      throw ConfigError(fmt::format("line {}: key '{}' outside any section", lineno, key), lineno, key);
    if (key.empty()) throw ConfigError(fmt::format("line {}: empty key", lineno), lineno);
    auto& sec = sections[current];
    if (sec.count(key))
      throw ConfigError(fmt::format("line {}: [{}] {}: duplicate key (first on line {})", lineno,
                                    current, key, sec[key].line),
                        lineno, key);
    sec[key] = {std::string(trim(line.substr(eq + 1))), lineno};
  }

  Scenario sc;
  sc.base_dir = base_dir;

  Section params = sections["params"];
  std::optional<std::size_t> translation_line, center_line;
  for (const char* key : {"h1", "h2", "h3"})
    if (params.count(key)) translation_line = params[key].line;
  for (const char* key : {"k1", "k2", "k3"}) {
    if (!params.count(key)) continue;
    center_line = params[key].line;
    sc.center_given = true;
    sc.center[key[1] - '1'] = Reader("params", key, params[key]).real();
    params.erase(key);
  }
  auto ph = param_handlers(sc.params);
  ph["k"] = [&](const Reader& r) { sc.k = r.real(); };
  apply("params", params, ph);
  if (sc.center_given) {
    if (translation_line)
      throw ConfigError(
          fmt::format("line {}: give either the translations h1, h2, h3 or the center k1, k2, k3, not both",
                      *center_line),
          *center_line, "k1");
    if (classify(sc.params) != SymmetryCase::Case1)
      throw ConfigError(fmt::format("line {}: k1, k2, k3 are only accepted for Case1 (h11 != 0 and h23 or h31 != 0)",
                                    *center_line),
                        *center_line, "k1");
    const Vec3d h = translation_for_center(sc.params, sc.center);
    sc.params.h1 = h[0];
    sc.params.h2 = h[1];
    sc.params.h3 = h[2];
  }

  apply("functions", sections["functions"],
        {{"F1", [&](const Reader& r) { sc.F1 = r.text(); }},
         {"F2", [&](const Reader& r) { sc.F2 = r.text(); }},
         {"F3", [&](const Reader& r) { sc.F3 = r.text(); }},
         {"G", [&](const Reader& r) { sc.G = r.text(); }}});

  RunSettings& run = sc.run;
  apply("run", sections["run"],
        {{"x0", [&](const Reader& r) { run.x0 = r.vec_list(); }},
         {"v0", [&](const Reader& r) { run.v0 = r.vec_list(); }},
         {"t0", [&](const Reader& r) { run.t0 = r.real(); }},
         {"dt", [&](const Reader& r) { run.dt = r.positive(); }},
         {"steps",
          [&](const Reader& r) {
            run.steps = r.unsigned_int();
            if (run.steps < 1) r.fail("must be at least 1");
          }},
         {"integrator",
          [&](const Reader& r) {
            const std::string s = r.text();
            if (s == "rk4") run.integrator = Integrator::RK4;
            else if (s == "boris") run.integrator = Integrator::Boris;
            else r.fail(fmt::format("expected rk4 or boris, got '{}'", s));
          }},
         {"box_lo", [&](const Reader& r) { run.box_lo = r.vec(); }},
         {"box_hi", [&](const Reader& r) { run.box_hi = r.vec(); }},
         {"speed", [&](const Reader& r) { run.speed = r.real(); }},
         {"axis_margin", [&](const Reader& r) { run.axis_margin = r.real(); }},
         {"cut_margin", [&](const Reader& r) { run.cut_margin = r.real(); }},
         {"samples",
          [&](const Reader& r) {
            run.samples = r.unsigned_int();
            if (run.samples < 1) r.fail("must be at least 1");
          }},
         {"seed", [&](const Reader& r) { run.seed = r.unsigned_int(); }},
         {"tol", [&](const Reader& r) { run.tol = r.positive(); }},
         {"drift_tol", [&](const Reader& r) { run.drift_tol = r.positive(); }},
         {"seeds", [&](const Reader& r) { run.seeds = r.vec_list(); }},
         {"ds", [&](const Reader& r) { run.ds = r.positive(); }},
         {"normalized", [&](const Reader& r) { run.normalized = r.boolean(); }},
         {"eps", [&](const Reader& r) { run.eps = r.real_list(); }},
         {"flow_ratio", [&](const Reader& r) { run.flow_ratio = r.positive(); }},
         {"trajectory", [&](const Reader& r) { run.trajectory = r.text(); }},
         {"corrupt_a", [&](const Reader& r) { run.corrupt_a = r.real(); }}});
  for (int i = 0; i < 3; ++i)
    if (!(run.box_lo[i] < run.box_hi[i]))
      throw ConfigError(fmt::format("[run] box_lo must lie below box_hi on axis {}", i), 0, "box_lo");
  if (run.v0.size() != 1 && run.v0.size() != run.x0.size())
    throw ConfigError(fmt::format("[run] v0 lists {} vectors for {} starting points", run.v0.size(),
                                  run.x0.size()),
                      0, "v0");

  if (sections.count("flow")) {
    SymmetryParams f;
    apply("flow", sections["flow"], param_handlers(f));
    sc.flow = f;
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot read scenario file '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path.parent_path());
}

FieldFunctions parse_functions(const Scenario& sc) {
  auto one = [](const char* key, const std::string& text) {
    try {
      return parse(text);
    } catch (const ParseError& e) {
      throw ConfigError(
          fmt::format("[functions] {}: {} at offset {} in '{}'", key, e.what(), e.offset(), text), 0, key);
    }
  };
  return {one("F1", sc.F1), one("F2", sc.F2), one("F3", sc.F3), one("G", sc.G)};
}

FieldSpec build_spec(const Scenario& sc) {
  FieldSpec spec(sc.params, parse_functions(sc), sc.k);
  return sc.run.corrupt_a != 0.0 ? spec.with_corruption(sc.run.corrupt_a) : spec;
}

namespace {

nlohmann::ordered_json params_json(const SymmetryParams& p) {
  return {{"h11", p.h11}, {"h12", p.h12}, {"h23", p.h23}, {"h31", p.h31}, {"h1", p.h1},
          {"h2", p.h2},   {"h3", p.h3},   {"c", p.c},     {"h0", p.h0}};
}

nlohmann::ordered_json vec_json(const Vec3d& v) { return {v[0], v[1], v[2]}; }

nlohmann::ordered_json vec_list_json(const std::vector<Vec3d>& vs) {
  auto a = nlohmann::ordered_json::array();
  for (const auto& v : vs) a.push_back(vec_json(v));
  return a;
}

}  // namespace

nlohmann::ordered_json scenario_echo(const Scenario& sc) {
  nlohmann::ordered_json j;
  j["params"] = params_json(sc.params);
  j["params"]["k"] = sc.k;
  if (sc.center_given) j["params"]["center"] = vec_json(sc.center);
  j["functions"] = {{"F1", sc.F1}, {"F2", sc.F2}, {"F3", sc.F3}, {"G", sc.G}};
  const RunSettings& r = sc.run;
  j["run"] = {{"x0", vec_list_json(r.x0)},
              {"v0", vec_list_json(r.v0)},
              {"t0", r.t0},
              {"dt", r.dt},
              {"steps", r.steps},
              {"integrator", std::string(to_string(r.integrator))},
              {"box_lo", vec_json(r.box_lo)},
              {"box_hi", vec_json(r.box_hi)},
              {"speed", r.speed},
              {"axis_margin", r.axis_margin},
              {"cut_margin", r.cut_margin},
              {"samples", r.samples},
              {"seed", r.seed},
              {"tol", r.tol},
              {"drift_tol", r.drift_tol},
              {"seeds", vec_list_json(r.seeds)},
              {"ds", r.ds},
              {"normalized", r.normalized},
              {"eps", r.eps},
              {"flow_ratio", r.flow_ratio},
              {"trajectory", r.trajectory},
              {"corrupt_a", r.corrupt_a}};
  if (sc.flow) j["flow"] = params_json(*sc.flow);
  return j;
}

}  // namespace symlorentz
