#pragma once

#include "checks.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <string>

namespace zn {

// Invalid configuration; `key` names the offending setting.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what) : std::runtime_error(what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

// Everything a run needs. String fields keep the user's decimal text so reports reproduce exactly.
struct RunConfig {
  CheckConfig check;
  bool x_given = false;
  std::string mode = "formula";
  std::string sweep_x;
  std::string output;
  std::string csv;
};

inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> k = {
      "model.n",          "model.r",          "model.x",           "model.i",         "precision.digits",
      "precision.guard",  "run.seed",         "run.samples",       "run.threads",     "lattice.radius",
      "correlation.radius", "correlation.M",  "correlation.delta0", "correlation.eps_rel", "correlation.v",
      "correlation.l",    "polarization.mode", "polarization.sweep_x", "output.path",  "output.csv"};
  return k;
}

inline int parse_int(const std::string& key, const std::string& s) {
  try {
    size_t pos = 0;
    long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return static_cast<int>(v);
  } catch (const std::exception&) {
    throw ConfigError(key, "`" + key + "` expects an integer, got '" + s + "'");
  }
}

inline double parse_decimal(const std::string& key, const std::string& s) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key, "`" + key + "` expects a decimal number, got '" + s + "'");
  }
}

// Validates a decimal and returns the original text.
inline std::string decimal_text(const std::string& key, const std::string& s) {
  parse_decimal(key, s);
  return s;
}

inline std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n"), b = s.find_last_not_of(" \t\r\n");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

inline void set_config_value(RunConfig& c, const std::string& key, const std::string& raw) {
  std::string v = trim(raw);
  auto& k = c.check;
  if (key == "model.n") k.n = parse_int(key, v);
  else if (key == "model.r") k.r = decimal_text(key, v);
  else if (key == "model.x") {
    k.x = decimal_text(key, v);
    c.x_given = true;
  } else if (key == "model.i") k.sector = parse_int(key, v);
  else if (key == "precision.digits") k.digits = parse_int(key, v);
  else if (key == "precision.guard") k.guard = parse_int(key, v);
  else if (key == "run.seed") k.seed = static_cast<unsigned long long>(parse_int(key, v));
  else if (key == "run.samples") k.samples = parse_int(key, v);
  else if (key == "run.threads") k.threads = parse_int(key, v);
  else if (key == "lattice.radius") k.radius = parse_int(key, v);
  else if (key == "correlation.radius") k.pipeline_radius = parse_int(key, v);
  else if (key == "correlation.M") k.M = parse_int(key, v);
  else if (key == "correlation.delta0") k.delta0 = decimal_text(key, v);
  else if (key == "correlation.eps_rel") k.eps_rel = decimal_text(key, v);
  else if (key == "correlation.v") k.v = decimal_text(key, v);
  else if (key == "correlation.l") k.l_labels = v;
  else if (key == "polarization.mode") c.mode = v;
  else if (key == "polarization.sweep_x") c.sweep_x = v;
  else if (key == "output.path") c.output = v;
  else if (key == "output.csv") c.csv = v;
  else throw ConfigError(key, "unknown configuration key `" + key + "`");
}

// Flat `dotted.key = value` lines; '#' starts a comment.
inline void parse_config_text(RunConfig& c, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno), "config line " + std::to_string(lineno) + " has no '='");
    set_config_value(c, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
}

inline void load_config_file(RunConfig& c, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config", "cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  parse_config_text(c, ss.str());
}

struct SweepSpec {
  double a = 0, b = 0;
  int count = 0;
};

inline SweepSpec parse_sweep(const std::string& s) {
  const std::string key = "polarization.sweep_x";
  SweepSpec sw;
  auto c1 = s.find(':'), c2 = s.rfind(':');
  if (c1 == std::string::npos || c1 == c2) throw ConfigError(key, "`" + key + "` expects a:b:N, got '" + s + "'");
  sw.a = parse_decimal(key, s.substr(0, c1));
  sw.b = parse_decimal(key, s.substr(c1 + 1, c2 - c1 - 1));
  sw.count = parse_int(key, s.substr(c2 + 1));
  if (sw.count < 1) throw ConfigError(key, "`" + key + "` needs N >= 1");
  for (double t : {sw.a, sw.b})
    if (!(t > 0 && t <= 0.9)) throw ConfigError(key, "`" + key + "` endpoints must lie in (0, 0.9]");
  return sw;
}

inline void check_x_range(const std::string& key, double x) {
  if (!(x > 0 && x <= 0.9)) throw ConfigError(key, "`x` must lie in (0, 0.9], got " + std::to_string(x));
}

// Rejects anything outside the certified ranges. `need_x` is false only for x sweeps.
inline void validate(const RunConfig& c, bool need_x) {
  const auto& k = c.check;
  if (k.n < 2) throw ConfigError("model.n", "`n` must be >= 2");
  if (!(parse_decimal("model.r", k.r) > 1)) throw ConfigError("model.r", "`r` must exceed 1");
  if (need_x && !c.x_given) throw ConfigError("model.x", "missing required value `x` (--x or model.x)");
  if (c.x_given) check_x_range("model.x", parse_decimal("model.x", k.x));
  if (k.sector < 0 || k.sector >= k.n) throw ConfigError("model.i", "`i` must lie in [0, n)");
  if (k.digits < 15) throw ConfigError("precision.digits", "`digits` must be >= 15");
  if (k.guard < 0) throw ConfigError("precision.guard", "`guard` must be >= 0");
  if (k.samples < 1) throw ConfigError("run.samples", "`samples` must be >= 1");
  if (k.threads < 1) throw ConfigError("run.threads", "`threads` must be >= 1");
  if (k.radius < 1) throw ConfigError("lattice.radius", "`radius` must be >= 1");
  if (k.pipeline_radius < 1) throw ConfigError("correlation.radius", "`correlation.radius` must be >= 1");
  if (k.M < 2 || k.M % 2) throw ConfigError("correlation.M", "`M` must be even and >= 2");
  if (!(parse_decimal("correlation.delta0", k.delta0) > 0)) throw ConfigError("correlation.delta0", "`delta0` must be positive");
  double e = parse_decimal("correlation.eps_rel", k.eps_rel);
  if (!(e > 0 && e < 1)) throw ConfigError("correlation.eps_rel", "`eps_rel` must lie in (0, 1)");
  if (c.mode != "formula" && c.mode != "pipeline" && c.mode != "both")
    throw ConfigError("polarization.mode", "`mode` must be formula, pipeline or both");
  if (c.mode != "formula" && (k.n < 2 || k.n > 3))
    throw ConfigError("model.n", "pipeline mode supports n = 2 and n = 3 only");
  if (!c.sweep_x.empty()) parse_sweep(c.sweep_x);
  if (!k.l_labels.empty()) {
    std::vector<Real> lab;
    try {
      lab = parse_labels("correlation.l", k.l_labels);
    } catch (const Error& e) {
      throw ConfigError("correlation.l", e.what());
    }
    if (static_cast<int>(lab.size()) != k.n) throw ConfigError("correlation.l", "`l` needs n labels");
    double s = 0;
    for (auto& t : lab) s += static_cast<double>(t);
    if (std::abs(s - (parse_decimal("model.r", k.r) - 1)) > 1e-12)
      throw ConfigError("correlation.l", "`l` labels must sum to r - 1");
  }
}

// Flat key -> value view of a configuration, as written into reports.
inline std::map<std::string, std::string> config_map(const RunConfig& c) {
  const auto& k = c.check;
  return {{"model.n", std::to_string(k.n)},
          {"model.r", k.r},
          {"model.x", c.x_given ? k.x : ""},
          {"model.i", std::to_string(k.sector)},
          {"precision.digits", std::to_string(k.digits)},
          {"precision.guard", std::to_string(k.guard)},
          {"run.seed", std::to_string(k.seed)},
          {"run.samples", std::to_string(k.samples)},
          {"run.threads", std::to_string(k.threads)},
          {"lattice.radius", std::to_string(k.radius)},
          {"correlation.radius", std::to_string(k.pipeline_radius)},
          {"correlation.M", std::to_string(k.M)},
          {"correlation.delta0", k.delta0},
          {"correlation.eps_rel", k.eps_rel},
          {"correlation.v", k.v},
          {"correlation.l", k.l_labels},
          {"polarization.mode", c.mode},
          {"polarization.sweep_x", c.sweep_x}};
}

}  // namespace zn
