#include "hsurf/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hsurf/checks.hpp"
#include "hsurf/errors.hpp"

namespace hsurf {

namespace {

struct Cursor {
  const std::string& text;
  std::size_t pos = 0;
  int line = 1;
  int col = 1;

  bool eof() const { return pos >= text.size(); }
  char peek() const { return eof() ? '\0' : text[pos]; }
  char take() {
    const char c = text[pos++];
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    return c;
  }
  void skip_inline_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) take();
  }
  [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(msg, line, col); }
};

TomlValue parse_scalar(Cursor& c) {
  c.skip_inline_ws();
  const int line0 = c.line, col0 = c.col;
  if (c.peek() == '"') {
    c.take();
    std::string s;
    while (!c.eof() && c.peek() != '"' && c.peek() != '\n') s += c.take();
    if (c.peek() != '"') throw ConfigError("unterminated string", line0, col0);
    c.take();
    return s;
  }
  std::string tok;
  while (!c.eof() && c.peek() != '\n' && c.peek() != '#' && c.peek() != ',' && c.peek() != ']')
    tok += c.take();
  while (!tok.empty() && std::isspace(static_cast<unsigned char>(tok.back()))) tok.pop_back();
  if (tok == "true") return true;
  if (tok == "false") return false;
  if (tok.empty()) throw ConfigError("expected a value", line0, col0);
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size())
    throw ConfigError("invalid value '" + tok + "'", line0, col0);
  return v;
}

TomlValue parse_value(Cursor& c) {
  c.skip_inline_ws();
  if (c.peek() != '[') return parse_scalar(c);
  c.take();  // '['
  std::vector<double> nums;
  std::vector<std::string> strs;
  bool first = true;
  for (;;) {
    c.skip_inline_ws();
    while (c.peek() == '\n') {
      c.take();
      c.skip_inline_ws();
    }
    if (c.peek() == ']') {
      c.take();
      break;
    }
    if (!first) {
      if (c.peek() != ',') c.fail("expected ',' in array");
      c.take();
      c.skip_inline_ws();
      while (c.peek() == '\n') {
        c.take();
        c.skip_inline_ws();
      }
      if (c.peek() == ']') {  // trailing comma
        c.take();
        break;
      }
    }
    TomlValue v = parse_scalar(c);
    if (std::holds_alternative<double>(v))
      nums.push_back(std::get<double>(v));
    else if (std::holds_alternative<std::string>(v))
      strs.push_back(std::get<std::string>(v));
    else
      c.fail("arrays hold numbers or strings");
    first = false;
  }
  if (!strs.empty() && !nums.empty()) c.fail("mixed array types");
  if (!strs.empty()) return strs;
  return nums;
}

}  // namespace

TomlDoc TomlDoc::parse_string(const std::string& text) {
  TomlDoc doc;
  Cursor c{text};
  std::string current;
  while (!c.eof()) {
    c.skip_inline_ws();
    const char ch = c.peek();
    if (ch == '\n') {
      c.take();
      continue;
    }
    if (ch == '#') {
      while (!c.eof() && c.peek() != '\n') c.take();
      continue;
    }
    if (ch == '[') {
      c.take();
      std::string name;
      while (!c.eof() && c.peek() != ']' && c.peek() != '\n') name += c.take();
      if (c.peek() != ']') c.fail("unterminated section header");
      c.take();
      current = name;
      doc.sections_[current];
      continue;
    }
    // key = value
    const int kline = c.line;
    std::string key;
    while (!c.eof() && (std::isalnum(static_cast<unsigned char>(c.peek())) || c.peek() == '_'))
      key += c.take();
    if (key.empty()) c.fail("expected a key");
    c.skip_inline_ws();
    if (c.peek() != '=') c.fail("expected '=' after key '" + key + "'");
    c.take();
    TomlValue v = parse_value(c);
    c.skip_inline_ws();
    if (!c.eof() && c.peek() == '#')
      while (!c.eof() && c.peek() != '\n') c.take();
    if (!c.eof() && c.peek() != '\n') c.fail("unexpected trailing input after value");
    doc.sections_[current][key] = TomlKey{std::move(v), kline};
  }
  return doc;
}

TomlDoc TomlDoc::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path, 0, 0);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str());
}

bool TomlDoc::has(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  return s != sections_.end() && s->second.count(key) > 0;
}

const std::map<std::string, TomlKey>* TomlDoc::section(const std::string& name) const {
  const auto s = sections_.find(name);
  return s == sections_.end() ? nullptr : &s->second;
}

double TomlDoc::number(const std::string& section, const std::string& key) const {
  if (!has(section, key))
    throw ConfigError("missing key [" + section + "] " + key, 0, 0);
  const TomlKey& k = sections_.at(section).at(key);
  if (const double* v = std::get_if<double>(&k.value)) return *v;
  throw ConfigError("[" + section + "] " + key + " must be a number", k.line, 1);
}

double TomlDoc::number_or(const std::string& section, const std::string& key,
                          double fallback) const {
  return has(section, key) ? number(section, key) : fallback;
}

std::string TomlDoc::str(const std::string& section, const std::string& key) const {
  if (!has(section, key))
    throw ConfigError("missing key [" + section + "] " + key, 0, 0);
  const TomlKey& k = sections_.at(section).at(key);
  if (const std::string* v = std::get_if<std::string>(&k.value)) return *v;
  throw ConfigError("[" + section + "] " + key + " must be a string", k.line, 1);
}

std::string TomlDoc::str_or(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
  return has(section, key) ? str(section, key) : fallback;
}

std::vector<double> TomlDoc::numbers(const std::string& section, const std::string& key) const {
  if (!has(section, key))
    throw ConfigError("missing key [" + section + "] " + key, 0, 0);
  const TomlKey& k = sections_.at(section).at(key);
  if (const auto* v = std::get_if<std::vector<double>>(&k.value)) return *v;
  throw ConfigError("[" + section + "] " + key + " must be a numeric array", k.line, 1);
}

std::vector<std::string> TomlDoc::strings(const std::string& section,
                                          const std::string& key) const {
  if (!has(section, key))
    throw ConfigError("missing key [" + section + "] " + key, 0, 0);
  const TomlKey& k = sections_.at(section).at(key);
  if (const auto* v = std::get_if<std::vector<std::string>>(&k.value)) return *v;
  if (std::holds_alternative<std::vector<double>>(k.value) &&
      std::get<std::vector<double>>(k.value).empty())
    return {};
  throw ConfigError("[" + section + "] " + key + " must be a string array", k.line, 1);
}

namespace {

Eigen::Vector3d vec3(const std::vector<double>& v, const std::string& what) {
  if (v.size() != 3) throw ConfigError(what + " must have 3 components", 0, 0);
  return Eigen::Vector3d(v[0], v[1], v[2]);
}

PrescribedFunction curvature_from(const TomlDoc& doc, const std::string& section) {
  const std::string kind = doc.str(section, "kind");
  if (kind == "constant") return PrescribedFunction::constant(doc.number(section, "h0"));
  if (kind == "translator") {
    const Eigen::Vector3d w = vec3(doc.numbers(section, "w"), "[" + section + "] w");
    return PrescribedFunction::translator(w.normalized(), doc.number(section, "lambda"));
  }
  if (kind == "rotational") {
    Eigen::Vector3d v = Eigen::Vector3d::UnitZ();
    if (doc.has(section, "v")) v = vec3(doc.numbers(section, "v"), "[" + section + "] v");
    return PrescribedFunction::rotational(v.normalized(), doc.str(section, "profile"));
  }
  if (kind == "expr") return PrescribedFunction::expression(doc.str(section, "expr"));
  throw ConfigError("unknown curvature kind '" + kind + "'", 0, 0);
}

PlanarDomain domain_from(const TomlDoc& doc) {
  PlanarDomain d;
  d.spacing = doc.number("domain", "spacing");
  if (d.spacing <= 0) throw ConfigError("[domain] spacing must be positive", 0, 0);
  const std::string shape = doc.str("domain", "shape");
  if (shape == "disc") {
    Disc disc;
    if (doc.has("domain", "center")) {
      const auto c = doc.numbers("domain", "center");
      if (c.size() != 2) throw ConfigError("[domain] center must have 2 components", 0, 0);
      disc.center = Eigen::Vector2d(c[0], c[1]);
    }
    disc.radius = doc.number("domain", "radius");
    d.shape = disc;
  } else if (shape == "polygon") {
    const auto flat = doc.numbers("domain", "vertices");
    if (flat.size() < 6 || flat.size() % 2 != 0)
      throw ConfigError("[domain] vertices must be a flat x,y list of 3+ points", 0, 0);
    PolygonShape poly;
    for (std::size_t i = 0; i < flat.size(); i += 2)
      poly.vertices.emplace_back(flat[i], flat[i + 1]);
    d.shape = poly;
  } else {
    throw ConfigError("unknown domain shape '" + shape + "'", 0, 0);
  }
  return d;
}

DirichletData boundary_from(const TomlDoc& doc) {
  if (!doc.has("boundary", "g")) return DirichletData::constant(0.0);
  const auto* sec = doc.section("boundary");
  const TomlKey& k = sec->at("g");
  if (const double* v = std::get_if<double>(&k.value)) return DirichletData::constant(*v);
  if (const std::string* s = std::get_if<std::string>(&k.value)) {
    try {
      return DirichletData::expression(*s);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(e.what()) + " in [boundary] g", k.line, e.column);
    }
  }
  throw ConfigError("[boundary] g must be a number or expression string", k.line, 1);
}

}  // namespace

RunConfig RunConfig::from_toml(const TomlDoc& doc) {
  RunConfig cfg;
  if (doc.section("curvature")) cfg.curvature = curvature_from(doc, "curvature");
  if (doc.section("domain")) cfg.domain = domain_from(doc);
  cfg.boundary = boundary_from(doc);

  cfg.solver.tolerance = doc.number_or("solver", "tolerance", 1e-10);
  cfg.solver.max_newton_iterations =
      static_cast<int>(doc.number_or("solver", "max_newton_iterations", 50));
  cfg.solver.continuation_steps =
      static_cast<int>(doc.number_or("solver", "continuation_steps", 10));
  if (cfg.solver.tolerance <= 0) throw ConfigError("[solver] tolerance must be positive", 0, 0);
  if (cfg.solver.continuation_steps < 1)
    throw ConfigError("[solver] continuation_steps must be >= 1", 0, 0);

  if (doc.has("checks", "requested")) {
    cfg.requested_checks = doc.strings("checks", "requested");
    const auto& known = check_ids();
    for (const auto& id : cfg.requested_checks)
      if (std::find(known.begin(), known.end(), id) == known.end())
        throw ConfigError("unknown check id '" + id + "'", 0, 0);
  }
  if (doc.has("checks", "slab_v")) cfg.slab_v = vec3(doc.numbers("checks", "slab_v"), "slab_v");
  if (doc.has("checks", "reflection_normal")) {
    const auto n = doc.numbers("checks", "reflection_normal");
    if (n.size() != 2) throw ConfigError("reflection_normal must have 2 components", 0, 0);
    cfg.reflection_normal = Eigen::Vector2d(n[0], n[1]);
  }

  cfg.output_dir = doc.str_or("output", "directory", "out");

  if (doc.section("sweep") && doc.has("sweep", "parameter")) {
    SweepSpec s;
    s.parameter = doc.str("sweep", "parameter");
    const auto range = doc.numbers("sweep", "range");
    if (range.size() != 2) throw ConfigError("[sweep] range must be [lo, hi]", 0, 0);
    s.lo = range[0];
    s.hi = range[1];
    s.steps = static_cast<int>(doc.number("sweep", "steps"));
    if (s.steps < 1 || s.hi < s.lo) throw ConfigError("[sweep] empty range", 0, 0);
    if (s.parameter != "h0" && s.parameter != "lambda" && s.parameter != "radius")
      throw ConfigError("[sweep] parameter must be h0, lambda, or radius", 0, 0);
    cfg.sweep = s;
  }

  if (doc.section("rotational")) {
    cfg.rotational.sigma = doc.number_or("rotational", "sigma", 1.0) >= 0 ? +1 : -1;
    if (doc.has("rotational", "target_radius"))
      cfg.rotational.target_radius = doc.number("rotational", "target_radius");
    if (doc.has("rotational", "max_arc_length"))
      cfg.rotational.max_arc_length = doc.number("rotational", "max_arc_length");
    cfg.rotational.angular_resolution =
        static_cast<int>(doc.number_or("rotational", "angular_resolution", 256));
    if (doc.has("rotational", "axis"))
      cfg.rotational.axis = vec3(doc.numbers("rotational", "axis"), "[rotational] axis").normalized();
  }

  if (doc.section("analyze")) {
    cfg.mesh_path = doc.str_or("analyze", "mesh", "");
    if (doc.has("analyze", "v"))
      cfg.analyze_v = vec3(doc.numbers("analyze", "v"), "[analyze] v").normalized();
    cfg.analyze_lambda = doc.number_or("analyze", "lambda", 0.0);
    if (doc.has("analyze", "h0_expr"))
      cfg.analyze_h0 = PrescribedFunction::expression(doc.str("analyze", "h0_expr"));
  }
  return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
  return from_toml(TomlDoc::parse_file(path));
}

}  // namespace hsurf
