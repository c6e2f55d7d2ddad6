#include "zn/config.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

using json = nlohmann::ordered_json;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr const char* kConfigEnv = "ZN_CONFIG";
constexpr const char* kCheckDefaultX = "0.3";

std::string dec(const zn::Real& v, int digits) { return v.str(digits, std::ios_base::scientific); }

json complex_json(const zn::Complex& z, int digits) {
  return json{{"re", dec(real(z), digits)}, {"im", dec(imag(z), digits)}};
}

json config_json(const zn::RunConfig& c) {
  json j = json::object();
  for (const auto& [k, v] : zn::config_map(c)) j[k] = v;
  return j;
}

json result_json(const zn::CheckResult& r, int digits) {
  json vals = json::array();
  for (const auto& v : r.values) vals.push_back(dec(v, 6));
  return json{{"group", r.group},
              {"name", r.name},
              {"identity", r.anchor},
              {"residual", dec(r.residual, digits)},
              {"tolerance", dec(r.tolerance, 3)},
              {"passed", r.passed},
              {"informational", r.informational},
              {"error", r.error},
              {"seconds", std::to_string(r.seconds)},
              {"values", vals},
              {"detail", r.detail}};
}

void emit(const json& report, const std::string& path) {
  if (path.empty()) {
    std::cout << report.dump(2) << "\n";
    return;
  }
  std::ofstream f(path);
  if (!f) throw zn::ConfigError("output.path", "cannot write report to '" + path + "'");
  f << report.dump(2) << "\n";
}

int error_report(const zn::RunConfig& cfg, int code, const std::string& msg, const std::string& key) {
  json report{{"schema", 1}, {"error", msg}, {"key", key}, {"exit_code", code}};
  std::ofstream f;
  if (!cfg.output.empty()) f.open(cfg.output);
  (f.is_open() ? static_cast<std::ostream&>(f) : std::cout) << report.dump(2) << "\n";
  return code;
}

int cmd_check(const std::string& group, const zn::RunConfig& cfg) {
  auto results = zn::run_group(group, cfg.check);
  int failed = 0, errors = 0, info = 0;
  for (const auto& r : results) {
    if (r.informational) {
      ++info;
      continue;
    }
    if (r.error) ++errors;
    else if (!r.passed) ++failed;
  }
  int code = errors ? kExitNumeric : failed ? kExitFail : 0;
  json report{{"schema", 1}, {"command", "check"}, {"group", group}, {"config", config_json(cfg)}};
  json arr = json::array();
  for (const auto& r : results) {
    arr.push_back(result_json(r, cfg.check.digits));
    std::cerr << (r.informational ? "INFO " : r.error ? "ERROR" : r.passed ? "PASS " : "FAIL ") << " " << r.group << "/"
              << r.name << "  residual " << dec(r.residual, 3) << "  tolerance " << dec(r.tolerance, 1) << "\n";
  }
  report["results"] = arr;
  report["summary"] = json{{"checks", results.size()}, {"failed", failed}, {"errors", errors}, {"informational", info}};
  report["exit_code"] = code;
  emit(report, cfg.output);
  return code;
}

zn::Real pipeline_tolerance(int n) { return zn::Real(n == 2 ? "1e-6" : "1e-4"); }

json pipeline_json(const zn::PolarizationResult& pr, const std::vector<zn::Real>& lab, int digits) {
  json raw = json::array(), deltas = json::array(), per_mu = json::array(), labels = json::array();
  for (const auto& z : pr.raw) raw.push_back(complex_json(z, digits));
  for (const auto& d : pr.deltas) deltas.push_back(dec(d, 6));
  for (const auto& z : pr.per_mu) per_mu.push_back(complex_json(z, digits));
  for (const auto& t : lab) labels.push_back(dec(t, digits));
  return json{{"value", complex_json(pr.value, digits)},
              {"chi_i", complex_json(pr.chi_i, digits)},
              {"l_labels", labels},
              {"deltas", deltas},
              {"raw", raw},
              {"per_mu", per_mu},
              {"error_estimate", dec(pr.error_estimate, 6)},
              {"delta_scaling", dec(pr.delta_scaling, 6)},
              {"divergent", pr.divergent},
              {"stable", pr.stable},
              {"tail_ratio", dec(pr.tail_ratio, 6)},
              {"quadrature_error", dec(pr.quad_error, 6)},
              {"seam_mismatch", dec(pr.seam, 6)},
              {"radius", pr.radius},
              {"M", pr.M}};
}

zn::PipelineSettings pipeline_settings(const zn::CheckConfig& k) {
  zn::PipelineSettings s;
  s.radius = k.pipeline_radius;
  s.M = k.M;
  s.delta0 = zn::Real(k.delta0.c_str());
  s.eps_rel = zn::Real(k.eps_rel.c_str());
  return s;
}

int cmd_polarization(const zn::RunConfig& cfg) {
  const auto& k = cfg.check;
  zn::Precision pr{k.digits, k.guard};
  zn::PrecisionScope scope(pr);
  zn::set_thread_cap(k.threads);
  const bool want_pipeline = cfg.mode != "formula";
  json report{{"schema", 1}, {"command", "polarization"}, {"config", config_json(cfg)}};
  int code = 0;

  if (!cfg.sweep_x.empty()) {
    zn::SweepSpec sw = zn::parse_sweep(cfg.sweep_x);
    std::ostringstream csv;
    csv << "x,formula_re,formula_im,formula_abs" << (want_pipeline ? ",pipeline_re,pipeline_im,discrepancy" : "") << "\n";
    json rows = json::array();
    for (int t = 0; t < sw.count; ++t) {
      zn::Real x = sw.count == 1 ? zn::Real(sw.a) : zn::Real(sw.a) + (zn::Real(sw.b) - zn::Real(sw.a)) * t / (sw.count - 1);
      zn::ModelParams p(k.n, zn::Real(k.r.c_str()), x, pr);
      zn::Complex f = zn::polarization_formula(k.sector, p);
      csv << dec(x, 6) << "," << dec(real(f), k.digits) << "," << dec(imag(f), k.digits) << "," << dec(abs(f), k.digits);
      json row{{"x", dec(x, 6)}, {"formula", complex_json(f, k.digits)}};
      if (want_pipeline) {
        auto lab = k.l_labels.empty() ? zn::generic_l_labels(k.n, p.r) : zn::parse_labels("correlation.l", k.l_labels);
        auto res = zn::polarization_pipeline(k.sector, lab, zn::Complex(zn::Real(k.v.c_str())), p, pipeline_settings(k));
        zn::Real disc = abs(res.value - f);
        csv << "," << dec(real(res.value), 12) << "," << dec(imag(res.value), 12) << "," << dec(disc, 6);
        row["pipeline"] = pipeline_json(res, lab, k.digits);
        row["discrepancy"] = dec(disc, 6);
        if (!(disc < pipeline_tolerance(k.n))) code = kExitFail;
      }
      csv << "\n";
      rows.push_back(row);
    }
    if (cfg.csv.empty()) std::cout << csv.str();
    else {
      std::ofstream f(cfg.csv);
      if (!f) throw zn::ConfigError("output.csv", "cannot write CSV to '" + cfg.csv + "'");
      f << csv.str();
    }
    report["sweep"] = rows;
    report["exit_code"] = code;
    if (!cfg.output.empty()) emit(report, cfg.output);
    return code;
  }

  zn::ModelParams p = zn::make_params(k);
  zn::Complex f = zn::polarization_formula(k.sector, p);
  report["formula"] = complex_json(f, k.digits);
  report["r_below_rank"] = p.r_below_rank;
  if (want_pipeline) {
    auto lab = k.l_labels.empty() ? zn::generic_l_labels(k.n, p.r) : zn::parse_labels("correlation.l", k.l_labels);
    auto res = zn::polarization_pipeline(k.sector, lab, zn::Complex(zn::Real(k.v.c_str())), p, pipeline_settings(k));
    zn::Real disc = abs(res.value - f);
    report["pipeline"] = pipeline_json(res, lab, k.digits);
    report["discrepancy"] = dec(disc, 6);
    report["tolerance"] = dec(pipeline_tolerance(k.n), 1);
    report["agree"] = disc < pipeline_tolerance(k.n);
    if (!(disc < pipeline_tolerance(k.n))) code = kExitFail;
  }
  report["exit_code"] = code;
  emit(report, cfg.output);
  return code;
}

// Flags shared by both subcommands; each maps onto a dotted config key.
struct FlagValues {
  std::map<std::string, std::string> values;
};

void add_flags(CLI::App* app, FlagValues& f) {
  auto add = [&](const std::string& flag, const std::string& key, const std::string& help) {
    app->add_option(flag, f.values[key], help + " (" + key + ")");
  };
  add("--n", "model.n", "rank n >= 2");
  add("--r", "model.r", "elliptic level r > 1");
  add("--x", "model.x", "nome x in (0, 0.9]");
  add("--i", "model.i", "boundary sector i");
  add("--digits", "precision.digits", "working decimal digits");
  add("--guard", "precision.guard", "guard digits");
  add("--seed", "run.seed", "random seed");
  add("--samples", "run.samples", "random draws per check");
  add("--threads", "run.threads", "thread cap");
  add("--radius", "lattice.radius", "lattice sum radius");
  add("--pipeline-radius", "correlation.radius", "lattice radius inside the pipeline");
  add("--M", "correlation.M", "quadrature points per circle");
  add("--delta0", "correlation.delta0", "largest u - v offset");
  add("--eps-rel", "correlation.eps_rel", "contour offset relative to |z|");
  add("--v", "correlation.v", "spectral point v");
  add("--l", "correlation.l", "comma-separated labels of xi + rho");
  add("--output,-o", "output.path", "JSON report path (stdout if empty)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"High-precision verification of the Z_n vertex and A_{n-1} face model identities"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, std::string("flat key = value config file (default: $") + kConfigEnv + ")");

  FlagValues check_flags, pol_flags;
  std::string group;
  auto* check = app.add_subcommand("check", "run a residual suite");
  check->add_option("group", group, "special-functions | ybe | vertex-face | tail | characters | correlation | all")
      ->required()
      ->check(CLI::IsMember({"special-functions", "ybe", "vertex-face", "tail", "characters", "correlation", "all"}));
  add_flags(check, check_flags);

  auto* pol = app.add_subcommand("polarization", "closed formula and contour pipeline for the polarization");
  add_flags(pol, pol_flags);
  pol->add_option("--mode", pol_flags.values["polarization.mode"], "formula | pipeline | both");
  pol->add_option("--sweep-x", pol_flags.values["polarization.sweep_x"], "a:b:N sweep of x, CSV output");
  pol->add_option("--csv", pol_flags.values["output.csv"], "CSV path for the sweep (stdout if empty)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  zn::RunConfig cfg;
  try {
    if (config_path.empty())
      if (const char* env = std::getenv(kConfigEnv)) config_path = env;
    if (!config_path.empty()) zn::load_config_file(cfg, config_path);
    const FlagValues& flags = check->parsed() ? check_flags : pol_flags;
    for (const auto& [key, value] : flags.values)
      if (!value.empty()) zn::set_config_value(cfg, key, value);
    if (!cfg.output.empty() && cfg.output == cfg.csv) throw zn::ConfigError("output.csv", "CSV and JSON paths coincide");
    bool sweep = pol->parsed() && !cfg.sweep_x.empty();
    if (check->parsed()) {
      cfg.mode = "formula";
      if (!cfg.x_given) zn::set_config_value(cfg, "model.x", kCheckDefaultX);
    }
    zn::validate(cfg, !sweep);
  } catch (const zn::ConfigError& e) {
    std::cerr << "config error [" << e.key() << "]: " << e.what() << "\n";
    return error_report(cfg, kExitConfig, e.what(), e.key());
  }

  try {
    if (check->parsed()) return cmd_check(group, cfg);
    return cmd_polarization(cfg);
  } catch (const zn::ConfigError& e) {
    std::cerr << "config error [" << e.key() << "]: " << e.what() << "\n";
    return error_report(cfg, kExitConfig, e.what(), e.key());
  } catch (const zn::Error& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return error_report(cfg, kExitNumeric, e.what(), "");
  }
}
