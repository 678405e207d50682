#pragma once

// Run configuration and its flat text format:
//
//   # comment
//   [grid]
//   dim = 1
//   N = 2048
//   [model]
//   theta = 2
//
// Sections are [grid], [model], [solver], [experiment]. Lists are comma
// separated; "a..b" expands to the doubling sequence a, 2a, 4a, ... <= b.
// Unknown sections or keys and malformed values are errors that name the
// key and the line. Command-line overrides use the same setters.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nlcl/model.hpp"
#include "nlcl/solver.hpp"

namespace nlcl {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { greens, solve, picard, decay, verify_lemmas };

inline const char* to_string(Command c) {
  switch (c) {
    case Command::greens: return "greens";
    case Command::solve: return "solve";
    case Command::picard: return "picard";
    case Command::decay: return "decay";
    case Command::verify_lemmas: return "verify-lemmas";
  }
  return "?";
}

inline std::optional<Command> parse_command(std::string_view s) {
  if (s == "greens") return Command::greens;
  if (s == "solve") return Command::solve;
  if (s == "picard") return Command::picard;
  if (s == "decay") return Command::decay;
  if (s == "verify-lemmas") return Command::verify_lemmas;
  return std::nullopt;
}

struct RunConfig {
  Command command = Command::solve;
  std::string id = "run";

  // [grid]
  int dim = 1;
  std::size_t N = 256;
  double L = 64.0;

  // [model]
  ModelParams model;

  // [solver]
  SolverConfig solver;
  bool strict_dealias = false;

  // [experiment]: initial data u0 = A exp(-|x|^2 / (4 a))
  double amplitude = 1.0;
  double width = 1.0;
  // decay
  double s = 1.0;
  std::vector<double> orders{0.0, 1.0};
  std::optional<double> mu;
  double t_min = 5.0;
  double tol_L2 = 0.05, tol_Lambda = 0.05, tol_Hs2 = 0.05, tol_low = 0.05;
  double l1_bound = 3.0;
  // greens
  std::vector<double> times{1, 2, 4, 8, 16, 32, 64, 128};
  double delta = 0.5;
  double R = 3.0;
  std::optional<int> envelope_order;
  // picard
  double T0 = 0.1;
  int substeps = 400;
  int max_iter = 40;
  double picard_tol = 1e-10;
  double picard_s = 1.0;
  double match_tol = 1e-6;
  // verify-lemmas
  int fields = 1000;
  long kmax = 16;

  std::uint64_t seed = 1;
  int threads = 1;

  /// Hypothesis warnings collected by finalize().
  std::vector<std::string> warnings;

  /// Synchronizes derived fields and validates; fills `warnings`.
  void finalize() {
    solver.model = model;
    if (strict_dealias) solver.dealias_rule = strict_dealias_rule(model.theta);
    (void)Grid(dim, N, L);  // validates
    model.validate(dim);
    solver.validate();
    if (threads < 1) throw ConfigError("threads must be >= 1");
    if (fields < 1) throw ConfigError("experiment.fields must be >= 1");
    warnings = hypothesis_violations(model, dim, command == Command::decay);
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double to_double(const std::string& v) {
  if (v == "inf" || v == "infinity") return std::numeric_limits<double>::infinity();
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end || v.empty()) throw std::invalid_argument("expects a number, got '" + v + "'");
  return out;
}

inline long to_long(const std::string& v) {
  long out = 0;
  const auto* end = v.data() + v.size();
  const auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end || v.empty()) throw std::invalid_argument("expects an integer, got '" + v + "'");
  return out;
}

inline bool to_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("expects true/false, got '" + v + "'");
}

inline std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

inline std::string fmt_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fmt(v[i]);
  return out;
}

}  // namespace detail

/// "a..b" -> a, 2a, 4a, ... up to b; otherwise a comma separated list.
inline std::vector<double> parse_list(const std::string& text) {
  const std::string v = detail::trim(text);
  if (const auto dots = v.find(".."); dots != std::string::npos) {
    const double a = detail::to_double(detail::trim(v.substr(0, dots)));
    const double b = detail::to_double(detail::trim(v.substr(dots + 2)));
    if (!(a > 0.0) || !(b >= a) || !std::isfinite(b))
      throw std::invalid_argument("range '" + v + "' needs 0 < a <= b");
    std::vector<double> out;
    for (double x = a; x <= b * (1.0 + 1e-12); x *= 2.0) out.push_back(x);
    return out;
  }
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(detail::to_double(detail::trim(item)));
  if (out.empty()) throw std::invalid_argument("expects a non-empty list");
  return out;
}

struct ConfigKey {
  std::string section;
  std::string key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

inline const std::vector<ConfigKey>& config_schema() {
  using detail::fmt;
  using detail::to_double;
  using detail::to_long;
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> k;
    auto real = [&k](std::string sec, std::string key, double RunConfig::*m) {
      k.push_back({sec, key, [m](RunConfig& c, const std::string& v) { c.*m = to_double(v); },
                   [m](const RunConfig& c) { return fmt(c.*m); }});
    };
    auto integer = [&k](std::string sec, std::string key, int RunConfig::*m) {
      k.push_back({sec, key, [m](RunConfig& c, const std::string& v) { c.*m = static_cast<int>(to_long(v)); },
                   [m](const RunConfig& c) { return std::to_string(c.*m); }});
    };
    auto list = [&k](std::string sec, std::string key, std::vector<double> RunConfig::*m) {
      k.push_back({sec, key, [m](RunConfig& c, const std::string& v) { c.*m = parse_list(v); },
                   [m](const RunConfig& c) { return detail::fmt_list(c.*m); }});
    };

    integer("grid", "dim", &RunConfig::dim);
    k.push_back({"grid", "N",
                 [](RunConfig& c, const std::string& v) {
                   const long n = to_long(v);
                   if (n < 0) throw std::invalid_argument("expects a nonnegative integer");
                   c.N = static_cast<std::size_t>(n);
                 },
                 [](const RunConfig& c) { return std::to_string(c.N); }});
    real("grid", "L", &RunConfig::L);

    k.push_back({"model", "s1", [](RunConfig& c, const std::string& v) { c.model.s1 = to_double(v); },
                 [](const RunConfig& c) { return fmt(c.model.s1); }});
    k.push_back({"model", "s2", [](RunConfig& c, const std::string& v) { c.model.s2 = to_double(v); },
                 [](const RunConfig& c) { return fmt(c.model.s2); }});
    k.push_back({"model", "theta",
                 [](RunConfig& c, const std::string& v) { c.model.theta = static_cast<int>(to_long(v)); },
                 [](const RunConfig& c) { return std::to_string(c.model.theta); }});
    k.push_back({"model", "flux_dir", [](RunConfig& c, const std::string& v) { c.model.flux_dir = parse_list(v); },
                 [](const RunConfig& c) { return detail::fmt_list(c.model.flux_dir); }});
    k.push_back({"model", "flux_scale", [](RunConfig& c, const std::string& v) { c.model.flux_scale = to_double(v); },
                 [](const RunConfig& c) { return fmt(c.model.flux_scale); }});

    k.push_back({"solver", "dt", [](RunConfig& c, const std::string& v) { c.solver.dt = to_double(v); },
                 [](const RunConfig& c) { return fmt(c.solver.dt); }});
    k.push_back({"solver", "T", [](RunConfig& c, const std::string& v) { c.solver.T = to_double(v); },
                 [](const RunConfig& c) { return fmt(c.solver.T); }});
    k.push_back({"solver", "integrator",
                 [](RunConfig& c, const std::string& v) {
                   if (v == "ETD1") c.solver.integrator = Integrator::ETD1;
                   else if (v == "ETDRK2") c.solver.integrator = Integrator::ETDRK2;
                   else throw std::invalid_argument("expects ETD1 or ETDRK2, got '" + v + "'");
                 },
                 [](const RunConfig& c) { return std::string(to_string(c.solver.integrator)); }});
    k.push_back({"solver", "dealias",
                 [](RunConfig& c, const std::string& v) {
                   if (v == "strict") c.strict_dealias = true;
                   else {
                     c.strict_dealias = false;
                     c.solver.dealias_rule = to_double(v);
                   }
                 },
                 [](const RunConfig& c) { return c.strict_dealias ? std::string("strict") : fmt(c.solver.dealias_rule); }});
    k.push_back({"solver", "record_every",
                 [](RunConfig& c, const std::string& v) { c.solver.record_every = static_cast<int>(to_long(v)); },
                 [](const RunConfig& c) { return std::to_string(c.solver.record_every); }});
    k.push_back({"solver", "snapshot_every",
                 [](RunConfig& c, const std::string& v) { c.solver.snapshot_every = static_cast<int>(to_long(v)); },
                 [](const RunConfig& c) { return std::to_string(c.solver.snapshot_every); }});

    k.push_back({"experiment", "id", [](RunConfig& c, const std::string& v) { c.id = v; },
                 [](const RunConfig& c) { return c.id; }});
    real("experiment", "amplitude", &RunConfig::amplitude);
    real("experiment", "width", &RunConfig::width);
    real("experiment", "s", &RunConfig::s);
    list("experiment", "orders", &RunConfig::orders);
    k.push_back({"experiment", "mu",
                 [](RunConfig& c, const std::string& v) {
                   if (v == "auto") c.mu.reset();
                   else c.mu = to_double(v);
                 },
                 [](const RunConfig& c) { return c.mu ? fmt(*c.mu) : std::string("auto"); }});
    real("experiment", "t_min", &RunConfig::t_min);
    real("experiment", "tol_L2", &RunConfig::tol_L2);
    real("experiment", "tol_Lambda", &RunConfig::tol_Lambda);
    real("experiment", "tol_Hs2", &RunConfig::tol_Hs2);
    real("experiment", "tol_low", &RunConfig::tol_low);
    real("experiment", "l1_bound", &RunConfig::l1_bound);
    list("experiment", "t", &RunConfig::times);
    real("experiment", "delta", &RunConfig::delta);
    real("experiment", "R", &RunConfig::R);
    k.push_back({"experiment", "envelope_order",
                 [](RunConfig& c, const std::string& v) {
                   if (v == "auto") c.envelope_order.reset();
                   else c.envelope_order = static_cast<int>(to_long(v));
                 },
                 [](const RunConfig& c) { return c.envelope_order ? std::to_string(*c.envelope_order) : std::string("auto"); }});
    real("experiment", "T0", &RunConfig::T0);
    integer("experiment", "substeps", &RunConfig::substeps);
    integer("experiment", "max_iter", &RunConfig::max_iter);
    real("experiment", "picard_tol", &RunConfig::picard_tol);
    real("experiment", "picard_s", &RunConfig::picard_s);
    real("experiment", "match_tol", &RunConfig::match_tol);
    integer("experiment", "fields", &RunConfig::fields);
    k.push_back({"experiment", "kmax", [](RunConfig& c, const std::string& v) { c.kmax = to_long(v); },
                 [](const RunConfig& c) { return std::to_string(c.kmax); }});
    k.push_back({"experiment", "seed",
                 [](RunConfig& c, const std::string& v) {
                   const long s = to_long(v);
                   if (s < 0) throw std::invalid_argument("expects a nonnegative integer");
                   c.seed = static_cast<std::uint64_t>(s);
                 },
                 [](const RunConfig& c) { return std::to_string(c.seed); }});
    return k;
  }();
  return keys;
}

/// Sets section.key = value; `where` prefixes error messages.
inline void set_config_value(RunConfig& cfg, const std::string& section, const std::string& key,
                             const std::string& value, const std::string& where) {
  bool known_section = false;
  for (const auto& k : config_schema()) {
    if (k.section != section) continue;
    known_section = true;
    if (k.key != key) continue;
    try {
      k.set(cfg, value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where + ": key '" + section + "." + key + "' " + e.what());
    }
    return;
  }
  if (!known_section) throw ConfigError(where + ": unknown section [" + section + "] for key '" + key + "'");
  throw ConfigError(where + ": unknown key '" + key + "' in section [" + section + "]");
}

/// "section.key=value" as used by --set.
inline void apply_override(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq)
    throw ConfigError("command line: override '" + assignment + "' must look like section.key=value");
  set_config_value(cfg, detail::trim(assignment.substr(0, dot)), detail::trim(assignment.substr(dot + 1, eq - dot - 1)),
                   detail::trim(assignment.substr(eq + 1)), "command line");
}

/// Parses the text format into `cfg` (keys not present keep their values).
inline void parse_config_text(RunConfig& cfg, std::istream& in, const std::string& name = "config") {
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = name + ":" + std::to_string(lineno);
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']' || t.size() < 3) throw ConfigError(where + ": malformed section header '" + t + "'");
      section = detail::trim(t.substr(1, t.size() - 2));
      if (section != "grid" && section != "model" && section != "solver" && section != "experiment")
        throw ConfigError(where + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value, got '" + t + "'");
    if (section.empty()) throw ConfigError(where + ": key outside of any section");
    const std::string key = detail::trim(t.substr(0, eq));
    if (key.empty()) throw ConfigError(where + ": missing key before '='");
    set_config_value(cfg, section, key, detail::trim(t.substr(eq + 1)), where);
  }
}

inline void parse_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  parse_config_text(cfg, in, path);
}

inline RunConfig parse_config_string(const std::string& text, Command cmd = Command::solve) {
  RunConfig cfg;
  cfg.command = cmd;
  std::istringstream in(text);
  parse_config_text(cfg, in);
  return cfg;
}

/// Effective configuration in the same text format.
inline std::string echo_config(const RunConfig& cfg) {
  std::ostringstream os;
  std::string section;
  for (const auto& k : config_schema()) {
    if (k.section != section) {
      if (!section.empty()) os << '\n';
      section = k.section;
      os << '[' << section << "]\n";
    }
    os << k.key << " = " << k.get(cfg) << '\n';
  }
  return os.str();
}

}  // namespace nlcl
