#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace shellgsm::cli {

namespace {

std::string located(const std::string& what, int line, int column) {
  if (line <= 0) return what;
  std::string where = "line " + std::to_string(line);
  if (column > 0) where += ", column " + std::to_string(column);
  return where + ": " + what;
}

}  // namespace

ConfigError::ConfigError(const std::string& what, int line, int column)
    : std::runtime_error(located(what, line, column)), line_(line), column_(column) {}

namespace {

struct Entry {
  std::string key, value;
  int line = 0, key_column = 0, value_column = 0;
  bool used = false;
};

struct Section {
  std::string name;
  int line = 0;
  std::vector<Entry> entries;

  Entry* find(std::string_view key) {
    for (auto& e : entries)
      if (e.key == key) return &e;
    return nullptr;
  }
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

const std::set<std::string> known_sections{"geometry", "layer", "frequency", "antenna", "task"};

std::vector<Section> tokenize(std::string_view text) {
  std::vector<Section> sections;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    const int indent = static_cast<int>(raw.find_first_not_of(" \t")) + 1;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("unterminated section header", line_no, indent);
      const std::string name(trim(line.substr(1, line.size() - 2)));
      if (!known_sections.count(name))
        throw ConfigError("unknown section [" + name + "]", line_no, indent);
      if (name != "layer")
        for (const auto& s : sections)
          if (s.name == name)
            throw ConfigError("section [" + name + "] repeated (first at line " + std::to_string(s.line) + ")",
                              line_no, indent);
      sections.push_back({name, line_no, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line_no, indent);
    if (sections.empty()) throw ConfigError("key outside of any section", line_no, indent);
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) throw ConfigError("missing key before '='", line_no, indent);
    std::string_view value = trim(line.substr(eq + 1));
    const int value_column =
        static_cast<int>(raw.find_first_not_of(" \t", raw.find('=') + 1) == std::string_view::npos
                             ? raw.size()
                             : raw.find_first_not_of(" \t", raw.find('=') + 1)) +
        1;
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    auto& sec = sections.back();
    if (const auto* prev = sec.find(key))
      throw ConfigError("duplicate key '" + key + "' (first at line " + std::to_string(prev->line) + ")", line_no,
                        indent);
    sec.entries.push_back({key, std::string(value), line_no, indent, value_column});
  }
  return sections;
}

double parse_number(const Entry& e) {
  double v = 0.0;
  const char* b = e.value.data();
  const char* end = b + e.value.size();
  const auto [p, ec] = std::from_chars(b, end, v);
  if (ec != std::errc() || p != end || !std::isfinite(v))
    throw ConfigError("'" + e.key + "' expects a number, got '" + e.value + "'", e.line, e.value_column);
  return v;
}

int parse_int(const Entry& e) {
  int v = 0;
  const char* b = e.value.data();
  const char* end = b + e.value.size();
  const auto [p, ec] = std::from_chars(b, end, v);
  if (ec != std::errc() || p != end)
    throw ConfigError("'" + e.key + "' expects an integer, got '" + e.value + "'", e.line, e.value_column);
  return v;
}

cplx complex_entry(const Entry& e) {
  try {
    return parse_complex(e.value);
  } catch (const std::invalid_argument& ex) {
    throw ConfigError("'" + e.key + "': " + ex.what(), e.line, e.value_column);
  }
}

// Reads keys off one section and rejects whatever is left over.
class Reader {
public:
  explicit Reader(Section& s) : s_(s) {}

  Entry* get(std::string_view key) {
    auto* e = s_.find(key);
    if (e) e->used = true;
    return e;
  }
  Entry& require(std::string_view key) {
    auto* e = get(key);
    if (!e) throw ConfigError("[" + s_.name + "] is missing required key '" + std::string(key) + "'", s_.line);
    return *e;
  }
  double number(std::string_view key, double fallback) {
    const auto* e = get(key);
    return e ? parse_number(*e) : fallback;
  }
  cplx complex(std::string_view key, cplx fallback) {
    const auto* e = get(key);
    return e ? complex_entry(*e) : fallback;
  }
  void finish(const std::string& context = {}) {
    for (const auto& e : s_.entries)
      if (!e.used)
        throw ConfigError("unknown key '" + e.key + "' in [" + s_.name + "]" + context, e.line, e.key_column);
  }
  int line() const { return s_.line; }

private:
  Section& s_;
};

void read_geometry(Section& s, Config& c, double& rb_mm, double& ra_mm) {
  Reader r(s);
  rb_mm = parse_number(r.require("rb_mm"));
  ra_mm = parse_number(r.require("ra_mm"));
  c.bubble_eps = r.complex("bubble_eps", 1.0);
  c.bubble_mu = r.complex("bubble_mu", 1.0);
  c.exterior_eps = r.complex("exterior_eps", 1.0);
  c.exterior_mu = r.complex("exterior_mu", 1.0);
  r.finish();
  if (!(rb_mm > 0.0) || !(ra_mm > rb_mm))
    throw ConfigError("[geometry] needs 0 < rb_mm < ra_mm", s.line);
}

LayerConfig read_layer(Section& s, double& cursor_mm, double ra_mm) {
  Reader r(s);
  LayerConfig layer;
  layer.line = s.line;
  const auto& type = r.require("type");
  if (type.value == "iso") {
    layer.type = LayerType::iso;
  } else if (type.value == "uniaxial") {
    layer.type = LayerType::uniaxial;
  } else if (type.value == "profile") {
    layer.type = LayerType::profile;
  } else {
    throw ConfigError("unsupported layer type '" + type.value +
                          "': media must be isotropic or uniaxially anisotropic (iso, uniaxial, profile)",
                      type.line, type.value_column);
  }

  const auto* inner = r.get("r_inner_mm");
  const auto* outer = r.get("r_outer_mm");
  const auto* thick = r.get("thickness_mm");
  double r_in = inner ? parse_number(*inner) : cursor_mm;
  double r_out = 0.0;
  if (thick && outer)
    throw ConfigError("give either thickness_mm or r_outer_mm, not both", thick->line, thick->key_column);
  if (thick) {
    r_out = r_in + parse_number(*thick);
  } else if (outer) {
    r_out = parse_number(*outer);
  } else {
    throw ConfigError("[layer] needs thickness_mm or r_outer_mm", s.line);
  }
  // Sums like 150 + 15 + 15 should land exactly on ra.
  if (std::abs(r_in - cursor_mm) < 1e-9) r_in = cursor_mm;
  if (std::abs(r_out - ra_mm) < 1e-9) r_out = ra_mm;
  cursor_mm = r_out;
  layer.r_inner = r_in * 1e-3;
  layer.r_outer = r_out * 1e-3;

  const char* type_name = type.value.c_str();
  switch (layer.type) {
    case LayerType::iso: {
      layer.eps_perp = layer.eps_r = r.complex("eps", 1.0);
      layer.mu_perp = layer.mu_r = r.complex("mu", 1.0);
      break;
    }
    case LayerType::uniaxial:
      layer.eps_perp = r.complex("eps_perp", 1.0);
      layer.eps_r = r.complex("eps_r", 1.0);
      layer.mu_perp = r.complex("mu_perp", 1.0);
      layer.mu_r = r.complex("mu_r", 1.0);
      break;
    case LayerType::profile:
      layer.expr_eps_perp = r.require("eps_perp").value;
      layer.expr_eps_r = r.require("eps_r").value;
      if (const auto* e = r.get("mu_perp")) layer.expr_mu_perp = e->value;
      if (const auto* e = r.get("mu_r")) layer.expr_mu_r = e->value;
      break;
  }
  r.finish(std::string(" for type ") + type_name);
  return layer;
}

std::vector<int> int_list(const Entry& e) {
  std::vector<int> out;
  std::stringstream ss(e.value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto t = trim(item);
    int v = 0;
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || p != t.data() + t.size() || v < 1)
      throw ConfigError("'" + e.key + "' expects a comma-separated list of positive integers", e.line,
                        e.value_column);
    out.push_back(v);
  }
  return out;
}

const std::set<std::string> task_types{"sso", "compose", "sparams", "pattern", "rcs", "validate", "sweep"};
const std::set<std::string> sweep_parameters{"eps", "mu", "eps_perp", "eps_r", "mu_perp", "mu_r"};

TaskConfig read_task(Section& s) {
  Reader r(s);
  TaskConfig t;
  if (const auto* e = r.get("type")) {
    if (!task_types.count(e->value))
      throw ConfigError("unknown task type '" + e->value + "'", e->line, e->value_column);
    t.type = e->value;
  }
  if (const auto* e = r.get("port_drive")) t.port_drive = parse_int(*e);
  t.step_deg = r.number("step_deg", 1.0);
  if (!(t.step_deg > 0.0 && t.step_deg <= 90.0)) throw ConfigError("step_deg must be in (0, 90]", s.line);
  t.theta_inc_deg = r.number("theta_inc_deg", 0.0);
  t.phi_inc_deg = r.number("phi_inc_deg", 0.0);
  if (const auto* e = r.get("pol")) {
    if (e->value == "theta") {
      t.pol_theta = 1.0, t.pol_phi = 0.0;
    } else if (e->value == "phi") {
      t.pol_theta = 0.0, t.pol_phi = 1.0;
    } else {
      throw ConfigError("pol must be 'theta' or 'phi'", e->line, e->value_column);
    }
  }
  t.pol_theta = r.complex("pol_theta", t.pol_theta);
  t.pol_phi = r.complex("pol_phi", t.pol_phi);
  t.amplitude = r.number("amplitude", 1.0);
  if (const auto* e = r.get("staircase")) t.staircase = int_list(*e);
  if (const auto* e = r.get("validate_ghz")) t.validate_ghz = parse_number(*e);

  if (const auto* e = r.get("sweep_layer")) t.sweep.layer = parse_int(*e);
  if (const auto* e = r.get("sweep_parameter")) {
    if (!sweep_parameters.count(e->value))
      throw ConfigError("sweep_parameter must be one of eps, mu, eps_perp, eps_r, mu_perp, mu_r", e->line,
                        e->value_column);
    t.sweep.parameter = e->value;
  }
  if (const auto* e = r.get("sweep_component")) {
    if (e->value != "real" && e->value != "imag")
      throw ConfigError("sweep_component must be 'real' or 'imag'", e->line, e->value_column);
    t.sweep.imaginary = e->value == "imag";
  }
  t.sweep.start = r.number("sweep_start", 0.0);
  t.sweep.stop = r.number("sweep_stop", t.sweep.start);
  if (const auto* e = r.get("sweep_points")) t.sweep.points = parse_int(*e);
  r.finish();
  return t;
}

}  // namespace

cplx parse_complex(std::string_view text) {
  std::string s;
  for (char ch : text)
    if (ch != ' ' && ch != '\t') s.push_back(ch);
  if (s.empty()) throw std::invalid_argument("empty complex literal");
  const auto bad = [&] { return std::invalid_argument("malformed complex literal '" + std::string(text) + "'"); };

  // Split at a sign that is not the leading one and not an exponent sign.
  std::size_t split = std::string::npos;
  for (std::size_t i = 1; i < s.size(); ++i)
    if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') split = i;

  const auto real_part = [&](std::string_view t) {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || p != t.data() + t.size()) throw bad();
    return v;
  };
  const auto imag_part = [&](std::string_view t) {
    if (t.empty() || t.back() != 'j') throw bad();
    t.remove_suffix(1);
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    return real_part(t.front() == '+' ? t.substr(1) : t);
  };

  const std::string_view all(s);
  if (split == std::string::npos) {
    if (all.back() == 'j') return {0.0, imag_part(all)};
    return {real_part(all.front() == '+' ? all.substr(1) : all), 0.0};
  }
  const auto head = all.substr(0, split);
  const auto tail = all.substr(split);
  if (head.back() == 'j') throw bad();
  return {real_part(head.front() == '+' ? head.substr(1) : head), imag_part(tail)};
}

std::vector<double> Config::frequencies() const {
  std::vector<double> f;
  for (int i = 0; i < points; ++i) f.push_back(points == 1 ? start_hz : start_hz + (stop_hz - start_hz) * i / (points - 1));
  return f;
}

Config parse_config(std::string_view text, const std::string& path) {
  auto sections = tokenize(text);
  Config c;
  c.path = path;
  const auto slash = path.find_last_of('/');
  c.directory = slash == std::string::npos ? "." : path.substr(0, slash);

  Section* geometry = nullptr;
  for (auto& s : sections)
    if (s.name == "geometry") geometry = &s;
  if (!geometry) throw ConfigError("missing [geometry] section");
  double rb_mm = 0.0, ra_mm = 0.0;
  read_geometry(*geometry, c, rb_mm, ra_mm);
  c.rb = rb_mm * 1e-3;
  c.ra = ra_mm * 1e-3;

  double cursor = rb_mm;
  bool have_frequency = false;
  for (auto& s : sections) {
    if (s.name == "layer") {
      c.layers.push_back(read_layer(s, cursor, ra_mm));
    } else if (s.name == "frequency") {
      have_frequency = true;
      Reader r(s);
      const double start = parse_number(r.require("start_ghz"));
      const double stop = r.number("stop_ghz", start);
      c.points = 1;
      if (const auto* e = r.get("points")) c.points = parse_int(*e);
      r.finish();
      if (!(start > 0.0)) throw ConfigError("start_ghz must be positive", s.line);
      if (stop < start) throw ConfigError("stop_ghz must not be below start_ghz", s.line);
      if (c.points < 1) throw ConfigError("points must be >= 1", s.line);
      if (c.points == 1 && stop != start)
        throw ConfigError("points must be >= 2 when stop_ghz differs from start_ghz", s.line);
      c.start_hz = start * 1e9;
      c.stop_hz = stop * 1e9;
    } else if (s.name == "antenna") {
      Reader r(s);
      const auto* src = r.get("source");
      const std::string source = src ? src->value : "transparent";
      if (source == "transparent") {
        c.antenna = AntennaSource::transparent;
      } else if (source == "null") {
        c.antenna = AntennaSource::null;
      } else if (source == "file") {
        c.antenna = AntennaSource::file;
      } else {
        throw ConfigError("antenna source must be transparent, null or file", src->line, src->value_column);
      }
      if (const auto* e = r.get("gsm_file")) {
        c.gsm_file = (!e->value.empty() && e->value.front() == '/') ? e->value : c.directory + "/" + e->value;
      }
      if (const auto* e = r.get("ports")) c.ports = parse_int(*e);
      r.finish();
      if (c.antenna == AntennaSource::file && c.gsm_file.empty())
        throw ConfigError("antenna source 'file' needs gsm_file", s.line);
      if (c.ports < 1) throw ConfigError("ports must be >= 1", s.line);
    } else if (s.name == "task") {
      c.task = read_task(s);
    }
  }
  if (c.layers.empty()) throw ConfigError("at least one [layer] section is required");
  if (!have_frequency) throw ConfigError("missing [frequency] section");
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

}  // namespace shellgsm::cli
