#include "nlpf/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "nlpf/error.hpp"

namespace nlpf {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "model.mu",          "model.L",            "model.D",
      "model.beta",        "model.c_F",          "model.alpha",
      "model.rho",         "model.theta_e",      "kernel.epsilon",
      "kernel.delta",      "grid.dim",           "grid.h",
      "time.tau",          "time.T",             "time.snapshots",
      "variant.name",      "solver.convolution_mode", "solver.pdas_c",
      "solver.pdas_max_iters", "solver.lin_tol",  "solver.energy_diagnostics",
      "init.preset",       "init.file",          "init.theta0",
      "output.directory",  "output.formats",     "output.include_exterior",
      "output.interface_tol"};
  return keys;
}

class Reader {
 public:
  explicit Reader(const ConfigTable& t) : t_(t) {}

  bool has(const std::string& key) const { return t_.entries.count(key) > 0; }

  const ConfigTable::Entry& entry(const std::string& key) const {
    auto it = t_.entries.find(key);
    if (it == t_.entries.end()) throw ConfigError(key, "required key missing");
    return it->second;
  }

  double number(const std::string& key) const {
    const auto& e = entry(key);
    return to_number(key, e.value, e.line);
  }
  double number(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }

  int integer(const std::string& key) const {
    const double v = number(key);
    if (v != static_cast<double>(static_cast<long long>(v))) {
      throw ConfigError(key, "expected an integer", entry(key).line);
    }
    return static_cast<int>(v);
  }

  bool boolean(const std::string& key) const {
    const auto& e = entry(key);
    if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
    if (e.value == "false" || e.value == "0" || e.value == "no") return false;
    throw ConfigError(key, "expected true or false", e.line);
  }

  std::vector<double> list(const std::string& key) const {
    const auto& e = entry(key);
    std::string s = e.value;
    if (!s.empty() && s.front() == '[') s.erase(0, 1);
    if (!s.empty() && s.back() == ']') s.pop_back();
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) out.push_back(to_number(key, item, e.line));
    }
    return out;
  }

  static double to_number(const std::string& key, const std::string& s, int line) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &pos);
    } catch (const std::exception&) {
      throw ConfigError(key, "expected a number, got '" + s + "'", line);
    }
    if (trim(s.substr(pos)).size() != 0) {
      throw ConfigError(key, "expected a number, got '" + s + "'", line);
    }
    return v;
  }

 private:
  const ConfigTable& t_;
};

// "name(a,b)" -> {a, b}
std::vector<double> preset_args(const std::string& key, const std::string& value,
                                const std::string& name, int line) {
  const auto open = value.find('(');
  const auto close = value.rfind(')');
  if (open == std::string::npos || close == std::string::npos || close < open ||
      trim(value.substr(0, open)) != name) {
    throw ConfigError(key, "expected " + name + "(...), got '" + value + "'", line);
  }
  std::vector<double> out;
  std::stringstream ss(value.substr(open + 1, close - open - 1));
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(Reader::to_number(key, trim(item), line));
  return out;
}

// Shortest representation that reads back to the same double.
std::string num(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void put(std::ostream& os, const char* key, double v) { os << key << " = " << num(v) << '\n'; }

}  // namespace

ConfigTable ConfigTable::parse(std::istream& is) {
  ConfigTable t;
  std::string section;
  std::string raw;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(std::string_view(raw).substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("", "unterminated section header", line);
      section = trim(std::string_view(s).substr(1, s.size() - 2));
      if (section.empty()) throw ConfigError("", "empty section name", line);
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("", "expected key = value", line);
    if (section.empty()) throw ConfigError("", "key outside of a [section]", line);
    const std::string key = section + "." + trim(std::string_view(s).substr(0, eq));
    if (!known_keys().count(key)) throw ConfigError(key, "unknown key", line);
    if (t.entries.count(key)) throw ConfigError(key, "duplicate key", line);
    t.entries[key] = {trim(std::string_view(s).substr(eq + 1)), line};
  }
  return t;
}

ConfigTable ConfigTable::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open config '" + path + "'");
  return parse(is);
}

void ConfigTable::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ConfigError(assignment, "override must have the form section.key=value");
  }
  const std::string key = trim(std::string_view(assignment).substr(0, eq));
  if (!known_keys().count(key)) throw ConfigError(key, "unknown key in override");
  entries[key] = {trim(std::string_view(assignment).substr(eq + 1)), 0};
}

std::string_view to_string(ConvolutionMode mode) {
  return mode == ConvolutionMode::Explicit ? "explicit" : "implicit";
}

ConvolutionMode parse_convolution_mode(std::string_view s) {
  if (s == "explicit") return ConvolutionMode::Explicit;
  if (s == "implicit") return ConvolutionMode::Implicit;
  throw ConfigError("solver.convolution_mode", "expected explicit or implicit");
}

RunConfig build_run_config(const ConfigTable& table) {
  Reader r(table);
  RunConfig c;
  c.variant = [&] {
    const auto& e = r.entry("variant.name");
    try {
      return parse_variant(e.value);
    } catch (const ConfigError&) {
      throw ConfigError("variant.name", "unknown variant '" + e.value + "'", e.line);
    }
  }();

  auto& m = c.model;
  m.mu = r.number("model.mu");
  m.L = r.number("model.L");
  m.D = r.number("model.D");
  m.alpha = r.number("model.alpha");
  m.rho = r.number("model.rho");
  m.theta_e = r.number("model.theta_e");
  m.c_F = r.number("model.c_F", 1.0 / 6.0);
  if (c.variant == Variant::NonlocalCH) {
    m.beta = r.number("model.beta");
  } else {
    m.beta = r.number("model.beta", 0.0);
  }

  c.epsilon = r.number("kernel.epsilon");
  if (is_nonlocal(c.variant)) {
    c.delta = r.number("kernel.delta");
  } else {
    c.delta = r.number("kernel.delta", 0.0);
  }

  c.dim = r.integer("grid.dim");
  c.h = r.number("grid.h");
  c.tau = r.number("time.tau");
  c.T = r.number("time.T");
  c.snapshots = r.has("time.snapshots") ? r.list("time.snapshots") : std::vector<double>{c.T};

  if (r.has("solver.convolution_mode")) {
    const auto& e = r.entry("solver.convolution_mode");
    if (e.value == "explicit") {
      c.pdas.convolution_mode = ConvolutionMode::Explicit;
    } else if (e.value == "implicit") {
      c.pdas.convolution_mode = ConvolutionMode::Implicit;
    } else {
      throw ConfigError("solver.convolution_mode", "expected explicit or implicit", e.line);
    }
  }
  c.pdas.c_penalty = r.number("solver.pdas_c", c.pdas.c_penalty);
  if (r.has("solver.pdas_max_iters")) c.pdas.max_iters = r.integer("solver.pdas_max_iters");
  c.pdas.lin_tol = r.number("solver.lin_tol", c.pdas.lin_tol);
  if (r.has("solver.energy_diagnostics")) {
    c.energy_diagnostics = r.boolean("solver.energy_diagnostics");
  }

  if (r.has("init.file") == r.has("init.preset")) {
    throw ConfigError("init.preset", "give exactly one of init.preset or init.file");
  }
  if (r.has("init.file")) {
    c.init.kind = InitialCondition::Kind::File;
    c.init.path = r.entry("init.file").value;
  } else {
    const auto& e = r.entry("init.preset");
    if (e.value.rfind("step", 0) == 0) {
      const auto a = preset_args("init.preset", e.value, "step", e.line);
      if (a.size() != 1) throw ConfigError("init.preset", "step takes one argument", e.line);
      c.init.kind = InitialCondition::Kind::Step;
      c.init.a = a[0];
    } else {
      const bool pool = e.value.rfind("pool", 0) == 0;
      const std::string name = pool ? "pool" : "box";
      const auto a = preset_args("init.preset", e.value, name, e.line);
      if (a.size() != 2 || !(a[0] < a[1])) {
        throw ConfigError("init.preset", name + " takes two arguments a < b", e.line);
      }
      c.init.kind = pool ? InitialCondition::Kind::Pool : InitialCondition::Kind::Box;
      c.init.a = a[0];
      c.init.b = a[1];
    }
  }
  c.init.theta0 = r.number("init.theta0", 0.0);

  if (r.has("output.directory")) c.output.directory = r.entry("output.directory").value;
  if (r.has("output.formats")) {
    const auto& e = r.entry("output.formats");
    c.output.csv = c.output.vtk = false;
    std::stringstream ss(e.value);
    std::string f;
    while (std::getline(ss, f, ',')) {
      f = trim(f);
      if (f == "csv") {
        c.output.csv = true;
      } else if (f == "vtk") {
        c.output.vtk = true;
      } else if (!f.empty()) {
        throw ConfigError("output.formats", "unknown format '" + f + "'", e.line);
      }
    }
  }
  if (r.has("output.include_exterior")) {
    c.output.include_exterior = r.boolean("output.include_exterior");
  }
  c.interface_tol = r.number("output.interface_tol", c.interface_tol);

  c.validate();
  return c;
}

RunConfig load_run_config(const std::string& path, const std::vector<std::string>& overrides) {
  auto table = ConfigTable::load(path);
  for (const auto& o : overrides) table.apply_override(o);
  return build_run_config(table);
}

void write_config(std::ostream& os, const RunConfig& c) {
  os << "[model]\n";
  put(os, "mu", c.model.mu);
  put(os, "L", c.model.L);
  put(os, "D", c.model.D);
  put(os, "beta", c.model.beta);
  put(os, "c_F", c.model.c_F);
  put(os, "alpha", c.model.alpha);
  put(os, "rho", c.model.rho);
  put(os, "theta_e", c.model.theta_e);
  os << "\n[kernel]\n";
  put(os, "epsilon", c.epsilon);
  if (c.delta > 0.0) put(os, "delta", c.delta);
  os << "\n[grid]\ndim = " << c.dim << '\n';
  put(os, "h", c.h);
  os << "\n[time]\n";
  put(os, "tau", c.tau);
  put(os, "T", c.T);
  os << "snapshots = ";
  for (std::size_t i = 0; i < c.snapshots.size(); ++i) {
    os << (i ? ", " : "") << num(c.snapshots[i]);
  }
  os << "\n\n[variant]\nname = " << to_string(c.variant) << "\n\n[solver]\n";
  os << "convolution_mode = " << to_string(c.pdas.convolution_mode) << '\n';
  put(os, "pdas_c", c.pdas.c_penalty);
  os << "pdas_max_iters = " << c.pdas.max_iters << '\n';
  put(os, "lin_tol", c.pdas.lin_tol);
  if (c.energy_diagnostics) {
    os << "energy_diagnostics = " << (*c.energy_diagnostics ? "true" : "false") << '\n';
  }
  os << "\n[init]\n";
  switch (c.init.kind) {
    case InitialCondition::Kind::Step:
      os << "preset = step(" << num(c.init.a) << ")\n";
      break;
    case InitialCondition::Kind::Box:
    case InitialCondition::Kind::Pool:
      os << "preset = " << (c.init.kind == InitialCondition::Kind::Box ? "box(" : "pool(")
         << num(c.init.a) << ", " << num(c.init.b) << ")\n";
      break;
    case InitialCondition::Kind::File:
      os << "file = " << c.init.path << '\n';
      break;
  }
  put(os, "theta0", c.init.theta0);
  os << "\n[output]\n";
  if (!c.output.directory.empty()) os << "directory = " << c.output.directory << '\n';
  os << "formats = " << (c.output.csv ? "csv" : "") << (c.output.csv && c.output.vtk ? "," : "")
     << (c.output.vtk ? "vtk" : "") << '\n';
  os << "include_exterior = " << (c.output.include_exterior ? "true" : "false") << '\n';
  put(os, "interface_tol", c.interface_tol);
}

}  // namespace nlpf
