#include "pdefense/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace pdefense {

namespace {

class Parser {
 public:
  Parser(const std::string& text, int line) : s_(text), line_(line) {}

  ConfigValue value() {
    skip_ws();
    if (pos_ >= s_.size()) fail("missing value");
    const char c = s_[pos_];
    if (c == '[') return array();
    if (c == '"') return {string()};
    if (s_.compare(pos_, 4, "true") == 0) {
      pos_ += 4;
      return {true};
    }
    if (s_.compare(pos_, 5, "false") == 0) {
      pos_ += 5;
      return {false};
    }
    return {number()};
  }

  void expect_end() {
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected trailing text '" + s_.substr(pos_) + "'");
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("config line " + std::to_string(line_) + ": " + what);
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  ConfigValue array() {
    ++pos_;
    ConfigValue::Array items;
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == ']') {
      ++pos_;
      return {items};
    }
    for (;;) {
      items.push_back(value());
      skip_ws();
      if (pos_ >= s_.size()) fail("unterminated array");
      if (s_[pos_] == ',') {
        ++pos_;
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == ']') {  // trailing comma
          ++pos_;
          return {items};
        }
        continue;
      }
      if (s_[pos_] == ']') {
        ++pos_;
        return {items};
      }
      fail("expected ',' or ']' in array");
    }
  }

  std::string string() {
    const std::size_t end = s_.find('"', pos_ + 1);
    if (end == std::string::npos) fail("unterminated string");
    std::string out = s_.substr(pos_ + 1, end - pos_ - 1);
    pos_ = end + 1;
    return out;
  }

  double number() {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s_.substr(pos_), &used);
    } catch (const std::exception&) {
      fail("expected a value at '" + s_.substr(pos_) + "'");
    }
    pos_ += used;
    return v;
  }

  const std::string& s_;
  int line_;
  std::size_t pos_ = 0;
};

std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

int bracket_balance(const std::string& s) {
  int depth = 0;
  bool in_string = false;
  for (char c : s) {
    if (c == '"') in_string = !in_string;
    if (in_string) continue;
    if (c == '[') ++depth;
    if (c == ']') --depth;
  }
  return depth;
}

void canonical(const ConfigValue& v, std::string& out) {
  if (const auto* d = std::get_if<double>(&v.v)) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", *d);
    out += buf;
  } else if (const auto* s = std::get_if<std::string>(&v.v)) {
    out += '"' + *s + '"';
  } else if (const auto* b = std::get_if<bool>(&v.v)) {
    out += *b ? "true" : "false";
  } else {
    out += '[';
    for (const auto& item : std::get<ConfigValue::Array>(v.v)) {
      canonical(item, out);
      out += ',';
    }
    out += ']';
  }
}

// Typed, key-checked access to the flattened document.
class Reader {
 public:
  explicit Reader(const ConfigDocument& doc) : doc_(doc) {}

  const ConfigValue* find(const std::string& key) {
    seen_.insert(key);
    auto it = doc_.find(key);
    return it == doc_.end() ? nullptr : &it->second;
  }

  [[noreturn]] static void bad(const std::string& key, const std::string& what) {
    throw ConfigError(key + ": " + what);
  }

  static double as_number(const std::string& key, const ConfigValue& v) {
    if (const auto* d = std::get_if<double>(&v.v)) return *d;
    bad(key, "expected a number");
  }

  void number(const std::string& key, double& out, bool positive = false) {
    if (const auto* v = find(key)) {
      out = as_number(key, *v);
      if (!std::isfinite(out)) bad(key, "must be finite");
      if (positive && !(out > 0.0)) bad(key, "must be positive");
    }
  }

  void count(const std::string& key, std::size_t& out, bool allow_zero = false) {
    if (const auto* v = find(key)) out = to_count(key, as_number(key, *v), allow_zero);
  }

  static std::size_t to_count(const std::string& key, double d, bool allow_zero) {
    if (d < 0.0 || std::floor(d) != d || (!allow_zero && d == 0.0))
      bad(key, allow_zero ? "expected a non-negative integer" : "expected a positive integer");
    return static_cast<std::size_t>(d);
  }

  std::optional<std::string> text(const std::string& key) {
    const auto* v = find(key);
    if (!v) return std::nullopt;
    if (const auto* s = std::get_if<std::string>(&v->v)) return *s;
    bad(key, "expected a string");
  }

  void flag(const std::string& key, bool& out) {
    if (const auto* v = find(key)) {
      if (const auto* b = std::get_if<bool>(&v->v)) {
        out = *b;
        return;
      }
      bad(key, "expected true or false");
    }
  }

  std::optional<std::vector<Point2>> points(const std::string& key) {
    const auto* v = find(key);
    if (!v) return std::nullopt;
    const auto* arr = std::get_if<ConfigValue::Array>(&v->v);
    if (!arr) bad(key, "expected an array of [x, y] pairs");
    std::vector<Point2> pts;
    for (const auto& item : *arr) {
      const auto* pair = std::get_if<ConfigValue::Array>(&item.v);
      if (!pair || pair->size() != 2) bad(key, "expected an array of [x, y] pairs");
      const Point2 p{as_number(key, (*pair)[0]), as_number(key, (*pair)[1])};
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) bad(key, "coordinates must be finite");
      pts.push_back(p);
    }
    return pts;
  }

  std::optional<std::vector<double>> numbers(const std::string& key) {
    const auto* v = find(key);
    if (!v) return std::nullopt;
    const auto* arr = std::get_if<ConfigValue::Array>(&v->v);
    if (!arr || arr->empty()) bad(key, "expected a non-empty array of numbers");
    std::vector<double> out;
    for (const auto& item : *arr) out.push_back(as_number(key, item));
    return out;
  }

  std::optional<std::vector<std::string>> texts(const std::string& key) {
    const auto* v = find(key);
    if (!v) return std::nullopt;
    const auto* arr = std::get_if<ConfigValue::Array>(&v->v);
    if (!arr || arr->empty()) bad(key, "expected a non-empty array of strings");
    std::vector<std::string> out;
    for (const auto& item : *arr) {
      const auto* s = std::get_if<std::string>(&item.v);
      if (!s) bad(key, "expected a non-empty array of strings");
      out.push_back(*s);
    }
    return out;
  }

  void reject_unknown() const {
    for (const auto& [key, value] : doc_)
      if (!seen_.count(key)) bad(key, "unknown key");
  }

 private:
  const ConfigDocument& doc_;
  std::set<std::string> seen_;
};

template <class F>
auto with_key(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

}  // namespace

ConfigDocument parse_config(const std::string& text) {
  ConfigDocument doc;
  std::istringstream in(text);
  std::string raw, table;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[' && line.find('=') == std::string::npos) {
      if (line.back() != ']' || line.size() < 3)
        throw ConfigError("config line " + std::to_string(line_no) + ": malformed table header");
      table = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    std::string rhs = trim(line.substr(eq + 1));
    const int start_line = line_no;
    while (bracket_balance(rhs) > 0 && std::getline(in, raw)) {
      ++line_no;
      rhs += ' ' + trim(strip_comment(raw));
    }
    Parser p(rhs, start_line);
    ConfigValue v = p.value();
    p.expect_end();
    const std::string full = table.empty() ? key : table + "." + key;
    if (!doc.emplace(full, std::move(v)).second)
      throw ConfigError(full + ": duplicate key");
  }
  return doc;
}

ConfigDocument load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

RunConfig run_config_from(const ConfigDocument& doc) {
  RunConfig cfg;
  Reader r(doc);

  auto verts = r.points("territory.vertices");
  if (!verts) Reader::bad("territory.vertices", "required");
  cfg.territory = *verts;
  (void)territory_of(cfg);

  DesignConfig& d = cfg.design;
  r.number("design.gamma", d.gamma, true);
  r.number("design.beta", d.beta, true);
  if (d.beta < 1.0) Reader::bad("design.beta", "safety factor must be at least 1");
  r.number("design.sensor_range", d.sensor_range, true);
  if (const auto* v = r.find("design.n_stations")) {
    if (const auto* s = std::get_if<std::string>(&v->v)) {
      if (*s != "auto") Reader::bad("design.n_stations", "expected a positive integer or \"auto\"");
    } else {
      d.initial_n_stations = Reader::to_count("design.n_stations", Reader::as_number("design.n_stations", *v), false);
      cfg.auto_stations = false;
    }
  }
  r.count("design.max_stations", d.max_stations);
  if (auto st = r.points("design.stations")) {
    if (st->empty()) Reader::bad("design.stations", "must not be empty");
    const ConvexPolygon poly = territory_of(cfg);
    for (const Point2& p : *st)
      if (!contains(poly, p)) Reader::bad("design.stations", "every station must lie inside the territory");
    d.fixed_stations = *st;
    d.initial_n_stations = st->size();
    cfg.auto_stations = false;
  }
  if (!cfg.auto_stations) d.max_stations = std::max(d.max_stations, d.initial_n_stations);
  if (d.max_stations < d.initial_n_stations) Reader::bad("design.max_stations", "smaller than n_stations");
  if (auto rule = r.text("design.station_rule")) {
    if (*rule == "nearest_to_intruder") d.station_rule = StationRule::nearest_to_intruder;
    else if (*rule == "nearest_to_perimeter_point") d.station_rule = StationRule::nearest_to_perimeter_point;
    else Reader::bad("design.station_rule", "expected nearest_to_intruder or nearest_to_perimeter_point");
  }
  r.count("design.station_restarts", d.station_restarts);
  r.count("design.monitor_restarts", d.monitor_restarts);
  double seed = static_cast<double>(d.seed);
  r.number("design.seed", seed);
  d.seed = Reader::to_count("design.seed", seed, true);
  r.count("design.ray_count", d.ray_count);
  if (d.ray_count < 64) Reader::bad("design.ray_count", "must be at least 64");
  r.count("design.perimeter_samples", d.perimeter_samples);
  double kink_deg = d.kink_threshold * 180.0 / std::numbers::pi;
  r.number("design.kink_threshold_deg", kink_deg, true);
  d.kink_threshold = kink_deg * std::numbers::pi / 180.0;
  if (r.find("design.max_spacing")) {
    double spacing = 0.0;
    r.number("design.max_spacing", spacing, true);
    d.max_spacing = spacing;
  }
  r.count("design.monitor_cap", d.monitor_cap);
  r.count("design.extra_layouts", d.extra_layouts, true);

  SimConfig& s = cfg.sim;
  r.number("assignment.alpha", s.alpha, true);
  if (const auto* v = r.find("assignment.kappa")) {
    if (const auto* str = std::get_if<std::string>(&v->v)) {
      if (*str != "auto") Reader::bad("assignment.kappa", "expected a number or \"auto\"");
    } else {
      const double k = Reader::as_number("assignment.kappa", *v);
      if (!(k > 0.0) || !std::isfinite(k)) Reader::bad("assignment.kappa", "must be positive");
      s.kappa = k;
    }
  }

  r.number("simulation.dt", s.dt, true);
  r.count("simulation.intruders", s.episode_intruder_total, true);
  r.count("simulation.concurrent", s.concurrent_intruders);
  r.number("simulation.v_i_max", s.v_i_max, true);
  s.v_i_min = s.v_i_max;
  r.number("simulation.v_i_min", s.v_i_min, true);
  if (s.v_i_min > s.v_i_max) Reader::bad("simulation.v_i_min", "exceeds v_i_max");
  r.number("simulation.v_d_max", s.v_d_max, true);
  r.number("simulation.epsilon", s.epsilon, true);
  r.number("simulation.pursuit_radius_factor", s.pursuit_radius_factor, true);
  r.number("simulation.omega_max_deg", s.omega_max_deg);
  if (s.omega_max_deg < 0.0) Reader::bad("simulation.omega_max_deg", "must be non-negative");
  if (auto p = r.text("simulation.policy")) s.policy = with_key("simulation.policy", [&] { return parse_policy(*p); });
  r.number("simulation.retarget_interval", s.retarget_interval);
  if (s.retarget_interval < 0.0) Reader::bad("simulation.retarget_interval", "must be non-negative");
  double sim_seed = static_cast<double>(s.seed);
  r.number("simulation.seed", sim_seed);
  s.seed = Reader::to_count("simulation.seed", sim_seed, true);
  r.flag("simulation.monitoring", s.monitoring_enabled);
  if (auto b = r.text("simulation.baseline"))
    s.baseline = with_key("simulation.baseline", [&] { return parse_baseline(*b); });
  if (auto p = r.text("simulation.predictor"); p && *p != "auto")
    s.predictor = with_key("simulation.predictor", [&] { return parse_predictor(*p); });
  r.number("simulation.spawn_radius_factor", s.spawn_radius_factor, true);
  if (s.spawn_radius_factor < 1.0) Reader::bad("simulation.spawn_radius_factor", "must be at least 1");
  r.number("simulation.max_time", s.max_time, true);

  MonteCarloSweep& m = cfg.sweep;
  r.count("montecarlo.runs", m.runs);
  if (auto w = r.numbers("montecarlo.omegas_deg")) {
    for (double x : *w)
      if (x < 0.0 || !std::isfinite(x)) Reader::bad("montecarlo.omegas_deg", "must be non-negative");
    m.omegas_deg = *w;
  }
  if (auto c = r.numbers("montecarlo.concurrent")) {
    m.concurrent.clear();
    for (double x : *c) m.concurrent.push_back(Reader::to_count("montecarlo.concurrent", x, false));
  }
  if (auto b = r.texts("montecarlo.baselines")) {
    m.baselines.clear();
    for (const auto& x : *b) m.baselines.push_back(with_key("montecarlo.baselines", [&] { return parse_baseline(x); }));
  }

  r.reject_unknown();

  std::string canon;
  for (const auto& [key, value] : doc) {
    canon += key + '=';
    canonical(value, canon);
    canon += '\n';
  }
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (unsigned char c : canon) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  cfg.hash = buf;
  return cfg;
}

RunConfig load_run_config(const std::string& path) { return run_config_from(load_config_file(path)); }

ConvexPolygon territory_of(const RunConfig& cfg) {
  try {
    return ConvexPolygon(cfg.territory);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("territory.vertices: ") + e.what());
  }
}

}  // namespace pdefense
