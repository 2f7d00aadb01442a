#ifndef PLCP_TOOLS_CLI_HPP
#define PLCP_TOOLS_CLI_HPP

// Batch front end: analytic curves, simulation, comparison, calculators.
// run_cli() is kept separate from main() so tests can drive it in-process.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "plcp/analytic.hpp"
#include "plcp/applications.hpp"
#include "plcp/experiments.hpp"
#include "plcp/io.hpp"
#include "plcp/oracle.hpp"
#include "plcp/sampler.hpp"

namespace plcp::cli {

enum ExitCode : int { kOk = 0, kConfig = 2, kQuadrature = 3, kRuntime = 4 };

namespace detail {

using json = nlohmann::ordered_json;

struct Common {
  double lambda = 1.0;
  double mu = 1.0;
  std::string grid = "0:3:0.01";
  std::string out;
  std::string meta;
};

inline void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::InvalidArgument, path, "cannot open output file");
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path);
}

inline std::string sidecar_path(const Common& c) {
  if (!c.meta.empty()) return c.meta;
  if (!c.out.empty() && c.out != "-") return c.out + ".json";
  return {};
}

inline PalmScenario parse_scenario(const std::string& s) {
  if (s == "point") return PalmScenario::typical_point();
  if (s == "intersection") return PalmScenario::typical_intersection(AngleLaw::PaperUniform);
  if (s == "intersection-sin") return PalmScenario::typical_intersection(AngleLaw::SinWeighted);
  throw Error(Errc::InvalidArgument, "scenario", "unknown scenario '" + s + "'");
}

inline TurnPolicy parse_policy(const std::string& s, int k, bool exact, bool directed) {
  TurnPolicy p;
  if (s == "zero-turn") {
    p = TurnPolicy::zero_turn();
  } else if (s == "one-turn") {
    p = TurnPolicy::one_turn();
  } else if (s == "two-turn-directed") {
    p = TurnPolicy::two_turn_directed();
  } else if (s == "k-turn") {
    if (k < 0) throw Error(Errc::PolicyBudgetNegative, "k", "turn budget must be >= 0");
    p = TurnPolicy::k_turn(k);
  } else {
    throw Error(Errc::InvalidArgument, "policy", "unknown policy '" + s + "'");
  }
  p.include_lower_turn_paths = !exact;
  p.positive_first_hop = p.positive_first_hop || directed;
  return p;
}

inline unsigned default_workers() {
  if (const char* env = std::getenv("PLCP_WORKERS")) {
    try {
      const int w = std::stoi(env);
      if (w >= 1) return static_cast<unsigned>(w);
    } catch (...) {
    }
  }
  return 1;
}

// Rewrites "--config path" into the file's key=value pairs as flags, placed
// right after the subcommand names so any explicit flag (parsed later, with
// take-last semantics) wins.
inline std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<long>(i));
      break;
    }
  }
  if (path.empty()) return args;
  const auto cfg = io::parse_config_file(path);
  std::size_t at = 0;
  if (!args.empty() && args[0].rfind('-', 0) != 0) {
    at = 1;
    if (args[0] == "app" && args.size() > 1 && args[1].rfind('-', 0) != 0) at = 2;
  }
  std::vector<std::string> injected;
  for (const auto& [k, v] : cfg) {
    if (k == "command") continue;
    injected.push_back("--" + k + "=" + v);
  }
  args.insert(args.begin() + static_cast<long>(at), injected.begin(), injected.end());
  return args;
}

}  // namespace detail

/// Runs one command. Returns the process exit code: 0 success, 2 bad
/// configuration, 3 quadrature failure, 4 runtime failure.
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  using detail::json;
  CLI::App app{"Shortest path length distributions on Poisson line Cox processes", "plcp"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_version_flag("--version", io::kVersion);
  std::string config_path;
  app.add_option("--config", config_path, "key=value file; explicit flags override it");

  const auto add_common = [](CLI::App* sub, detail::Common& c) {
    sub->add_option("--lambda", c.lambda, "line intensity")->capture_default_str();
    sub->add_option("--mu", c.mu, "point intensity per unit length")->capture_default_str();
    sub->add_option("--grid", c.grid, "t grid start:stop:step")->capture_default_str();
    sub->add_option("-o,--out", c.out, "output file (default stdout)");
    sub->add_option("--meta", c.meta, "JSON metadata file (default <out>.json)");
  };

  // analytic
  detail::Common an;
  std::string which, z_sign = "minus", norm = "per-angle", thresholds = "proof",
                     weighting = "count-integrated";
  double rel_tol = 1e-6, abs_tol = 1e-9, density = -1.0;
  auto* c_an = app.add_subcommand("analytic", "evaluate an analytic CDF on a grid");
  add_common(c_an, an);
  c_an->add_option("--which", which, "thm1|thm2|cor1|cor2|thm3-bound|naive|ppp")->required();
  c_an->add_option("--tol", rel_tol, "relative quadrature tolerance")->capture_default_str();
  c_an->add_option("--abs-tol", abs_tol, "absolute quadrature tolerance")->capture_default_str();
  c_an->add_option("--z-sign", z_sign, "thm2 first Z branch: minus|plus")->capture_default_str();
  c_an->add_option("--normalization", norm, "thm2 T_y angle factor: printed|per-angle")
      ->capture_default_str();
  c_an->add_option("--thresholds", thresholds, "thm2 E11 source: theorem|proof")
      ->capture_default_str();
  c_an->add_option("--weighting", weighting, "thm3 bound: count-integrated|as-printed")
      ->capture_default_str();
  c_an->add_option("--density", density, "ppp density (default lambda*mu)");

  // simulate
  detail::Common sim;
  std::string scenario = "point", policy = "one-turn";
  int k = 2;
  bool exact = false, directed = false;
  std::uint64_t trials = 10000, seed = 1;
  double t_max = -1.0, alpha = 0.05;
  unsigned workers = detail::default_workers();
  auto* c_sim = app.add_subcommand("simulate", "Monte Carlo ECDF of D");
  add_common(c_sim, sim);
  c_sim->add_option("--scenario", scenario, "point|intersection|intersection-sin")
      ->capture_default_str();
  c_sim->add_option("--policy", policy, "zero-turn|one-turn|two-turn-directed|k-turn")
      ->capture_default_str();
  c_sim->add_option("--k", k, "turn budget for k-turn")->capture_default_str();
  c_sim->add_flag("--exact", exact, "count only targets reached with the full turn budget");
  c_sim->add_flag("--directed", directed, "first hop along +x only");
  c_sim->add_option("--trials", trials)->capture_default_str();
  c_sim->add_option("--seed", seed)->capture_default_str();
  c_sim->add_option("--t-max", t_max, "censoring radius (default: grid end)");
  c_sim->add_option("--alpha", alpha, "DKW band level")->capture_default_str();
  c_sim->add_option("--workers", workers, "threads (env PLCP_WORKERS)")->capture_default_str();

  // compare
  std::string file_a, file_b, report_out;
  double ks_threshold = 0.01;
  auto* c_cmp = app.add_subcommand("compare", "KS distance between two curve CSVs");
  c_cmp->add_option("a", file_a)->required();
  c_cmp->add_option("b", file_b)->required();
  c_cmp->add_option("--ks-threshold", ks_threshold)->capture_default_str();
  c_cmp->add_option("-o,--out", report_out, "report file (default stdout)");

  // app
  app::RisLinkParams link;
  double p = 0.5;
  std::string reach_policy = "one-turn-point";
  ModelParams app_model;
  auto* c_app = app.add_subcommand("app", "application calculators");
  c_app->require_subcommand(1);
  const auto add_radio = [&](CLI::App* sub, bool far) {
    sub->add_option("--lambda", app_model.lambda)->capture_default_str();
    sub->add_option("--mu", app_model.mu)->capture_default_str();
    struct Field {
      const char* name;
      double* target;
      bool db;
    };
    std::vector<Field> fields{{"gt", &link.g_t, true},         {"gr", &link.g_r, true},
                              {"wavelength", &link.wavelength, false},
                              {"area", &link.area, false},     {"pt", &link.p_t, true},
                              {"n0", &link.n0, true},          {"gamma", &link.gamma, true}};
    if (far) {
      for (Field f : {Field{"g", &link.g, true}, Field{"m", &link.m, false},
                      Field{"n", &link.n, false}, Field{"dx", &link.d_x, false},
                      Field{"dy", &link.d_y, false}}) {
        fields.push_back(f);
      }
    }
    for (const Field& f : fields) {
      auto* lin = sub->add_option(std::string("--") + f.name, *f.target, "linear");
      if (f.db) {
        double* target = f.target;
        auto* db = sub->add_option_function<double>(
            std::string("--") + f.name + "-db", [target](double v) { *target = app::db_to_linear(v); },
            "in dB");
        db->excludes(lin);
      }
    }
  };
  auto* c_near = c_app->add_subcommand("ris-nearfield", "near-field RIS success probability");
  add_radio(c_near, false);
  auto* c_far = c_app->add_subcommand("ris-farfield", "far-field RIS success lower bound");
  add_radio(c_far, true);
  auto* c_ev = c_app->add_subcommand("ev-quantile", "path length reached with probability p");
  c_ev->add_option("--lambda", app_model.lambda)->capture_default_str();
  c_ev->add_option("--mu", app_model.mu)->capture_default_str();
  c_ev->add_option("--p", p)->capture_default_str();
  c_ev->add_option("--policy", reach_policy,
                   "one-turn-point|zero-turn-intersection|one-turn-intersection")
      ->capture_default_str();

  // calibrate
  detail::Common cal;
  cal.grid = "0:3:0.05";
  std::uint64_t cal_trials = 100000, cal_seed = 2024;
  auto* c_cal = app.add_subcommand("calibrate", "score every thm2 variant against MC");
  c_cal->add_option("--grid", cal.grid)->capture_default_str();
  c_cal->add_option("--trials", cal_trials)->capture_default_str();
  c_cal->add_option("--seed", cal_seed)->capture_default_str();
  c_cal->add_option("--workers", workers)->capture_default_str();
  c_cal->add_option("-o,--out", cal.out, "CSV of KS per variant");

  // sweep
  detail::Common sw;
  std::string out_dir = ".";
  std::uint64_t sw_trials = 100000, sw_seed = 1;
  auto* c_sw = app.add_subcommand("sweep", "all comparison curves at one (lambda, mu)");
  add_common(c_sw, sw);
  c_sw->add_option("--trials", sw_trials)->capture_default_str();
  c_sw->add_option("--seed", sw_seed)->capture_default_str();
  c_sw->add_option("--workers", workers)->capture_default_str();
  c_sw->add_option("--out-dir", out_dir)->capture_default_str();

  // dump
  double radius = 3.0;
  std::uint64_t dump_seed = 1, dump_stream = 0;
  ModelParams dump_model;
  std::string dump_scenario = "point", dump_out;
  auto* c_dump = app.add_subcommand("dump", "write one realization as JSON");
  c_dump->add_option("--lambda", dump_model.lambda)->capture_default_str();
  c_dump->add_option("--mu", dump_model.mu)->capture_default_str();
  c_dump->add_option("--scenario", dump_scenario)->capture_default_str();
  c_dump->add_option("--radius", radius)->capture_default_str();
  c_dump->add_option("--seed", dump_seed)->capture_default_str();
  c_dump->add_option("--stream", dump_stream)->capture_default_str();
  c_dump->add_option("-o,--out", dump_out);

  try {
    args = detail::expand_config(std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfig;
  } catch (const Error& e) {
    err << "plcp: " << e.what() << '\n';
    return kConfig;
  }

  try {
    if (c_an->parsed()) {
      const ModelParams params = validate({an.lambda, an.mu});
      const auto formula = analytic::parse_formula(which);
      const auto grid = io::parse_grid(an.grid);
      analytic::CurveOptions opt;
      if (z_sign != "minus" && z_sign != "plus") throw Error(Errc::InvalidArgument, "z-sign", "minus|plus");
      if (norm != "printed" && norm != "per-angle") throw Error(Errc::InvalidArgument, "normalization", "printed|per-angle");
      if (thresholds != "theorem" && thresholds != "proof") throw Error(Errc::InvalidArgument, "thresholds", "theorem|proof");
      if (weighting != "count-integrated" && weighting != "as-printed") throw Error(Errc::InvalidArgument, "weighting", "count-integrated|as-printed");
      opt.variant = {z_sign == "minus" ? analytic::ZSign::TheoremMinus : analytic::ZSign::ProofPlus,
                     norm == "printed" ? analytic::AngleNormalization::AsPrinted
                                       : analytic::AngleNormalization::PerAngleUniform,
                     thresholds == "theorem" ? analytic::ThresholdSource::TheoremStatement
                                             : analytic::ThresholdSource::ProofEquations};
      opt.weighting = weighting == "as-printed" ? analytic::TwoTurnWeighting::AsPrinted
                                                : analytic::TwoTurnWeighting::CountIntegrated;
      opt.spec.rel_tol = rel_tol;
      opt.spec.abs_tol = abs_tol;
      opt.spec.check();
      opt.bound_spec.rel_tol = std::max(rel_tol, 1e-5);
      opt.bound_spec.abs_tol = abs_tol;
      opt.ppp_density = density;
      const DistributionCurve curve = analytic::analytic_curve(formula, params, grid, opt);
      detail::write_text(an.out, io::curve_csv(curve, false), out);
      if (const auto side = detail::sidecar_path(an); !side.empty()) {
        json j = io::to_json(curve.meta);
        j["which"] = which;
        j["grid"] = an.grid;
        j["rel_tol"] = rel_tol;
        j["abs_tol"] = abs_tol;
        detail::write_text(side, j.dump(2) + "\n", out);
      }
    } else if (c_sim->parsed()) {
      const ModelParams params = validate({sim.lambda, sim.mu});
      const auto grid = io::parse_grid(sim.grid);
      if (grid.front() < 0.0) throw Error(Errc::NegativeT, "grid", "grid must start at t >= 0");
      if (trials < 1) throw Error(Errc::InvalidArgument, "trials", "trials must be >= 1");
      if (!(alpha > 0.0 && alpha < 1.0)) throw Error(Errc::InvalidArgument, "alpha", "alpha in (0, 1)");
      McSpec spec{params, detail::parse_scenario(scenario),
                  detail::parse_policy(policy, k, exact, directed), trials,
                  t_max > 0.0 ? t_max : grid.back(), seed, workers};
      if (grid.back() > spec.t_max + 1e-12) {
        throw Error(Errc::InvalidArgument, "grid", "grid exceeds t_max");
      }
      const DistributionCurve curve = run_mc(spec, grid, alpha);
      detail::write_text(sim.out, io::curve_csv(curve, true), out);
      if (const auto side = detail::sidecar_path(sim); !side.empty()) {
        json j = io::to_json(curve.meta);
        j["grid"] = sim.grid;
        j["alpha"] = alpha;
        j["dkw_halfwidth"] = dkw_halfwidth(trials, alpha);
        detail::write_text(side, j.dump(2) + "\n", out);
      }
    } else if (c_cmp->parsed()) {
      DistributionCurve a, b;
      try {
        a = io::read_curve_csv_file(file_a);
        b = io::read_curve_csv_file(file_b);
      } catch (const Error& e) {
        err << "plcp: " << e.what() << '\n';
        return kConfig;
      }
      const ComparisonReport r = compare(a, b);
      json j;
      j["ks"] = r.ks;
      j["argmax_t"] = r.argmax_t;
      j["inside_band_fraction"] =
          r.inside_band_fraction ? json(*r.inside_band_fraction) : json(nullptr);
      j["verdict"] = r.ks <= ks_threshold ? "pass" : "fail";
      j["ks_threshold"] = ks_threshold;
      j["a_ge_b"] = r.a_ge_b;
      j["b_ge_a"] = r.b_ge_a;
      j["points"] = r.grid.size();
      j["a"] = file_a;
      j["b"] = file_b;
      j["version"] = io::kVersion;
      detail::write_text(report_out, j.dump(2) + "\n", out);
    } else if (c_app->parsed()) {
      json j;
      j["lambda"] = app_model.lambda;
      j["mu"] = app_model.mu;
      if (c_ev->parsed()) {
        const auto pol = app::parse_reach_policy(reach_policy);
        j["p"] = p;
        j["policy"] = reach_policy;
        j["quantile"] = app::reach_quantile(app_model, p, pol);
      } else {
        const bool near = c_near->parsed();
        const app::LinkResult r = near ? app::nearfield_success(link, app_model)
                                       : app::farfield_success_lower_bound(link, app_model);
        j["calculator"] = near ? "ris-nearfield" : "ris-farfield";
        j["probability"] = r.probability;
        j["threshold_distance"] = r.threshold_distance;
      }
      j["version"] = io::kVersion;
      out << j.dump(2) << '\n';
    } else if (c_cal->parsed()) {
      const auto grid = io::parse_grid(cal.grid);
      const auto res = calibrate_theorem2({{0.5, 0.5}, {0.5, 1.0}, {1.0, 0.5}, {1.0, 1.0}}, grid,
                                          cal_trials, cal_seed, workers);
      std::string csv = "lambda,mu,angle_law,z_sign,normalization,thresholds,ks,argmax_t\n";
      for (const auto& row : res.rows) {
        const std::string cols = analytic::to_string(row.variant);  // sign,norm,thresholds
        csv += io::format_double(row.params.lambda) + "," + io::format_double(row.params.mu) + "," +
               (row.law == AngleLaw::PaperUniform ? "uniform" : "sin") + "," + cols + "," +
               io::format_double(row.ks) + "," + io::format_double(row.argmax_t) + "\n";
      }
      detail::write_text(cal.out, csv, out);
      err << "best variant: " << analytic::to_string(res.best)
          << " (worst-case KS " << res.best_worst_ks << ")\n";
    } else if (c_sw->parsed()) {
      SweepSpec spec;
      spec.params = {validate({sw.lambda, sw.mu})};
      spec.grid = io::parse_grid(sw.grid);
      spec.trials = sw_trials;
      spec.seed = sw_seed;
      spec.workers = workers;
      spec.t_max = spec.grid.back();
      const auto sets = figure_sweep(spec);
      std::filesystem::create_directories(out_dir);
      for (const auto& [name, curve] : sets.front()) {
        std::string file = name;
        std::replace(file.begin(), file.end(), ':', '_');
        const bool mc = name.rfind("mc:", 0) == 0;
        detail::write_text((std::filesystem::path(out_dir) / (file + ".csv")).string(),
                           io::curve_csv(curve, mc), out);
      }
    } else if (c_dump->parsed()) {
      const Realization real = sample_palm(validate(dump_model), detail::parse_scenario(dump_scenario),
                                           radius, SeedRecord{dump_seed, dump_stream});
      detail::write_text(dump_out, io::to_json(real).dump(2) + "\n", out);
    }
  } catch (const QuadratureError& e) {
    err << "plcp: " << e.what() << " (best estimate " << e.best_estimate() << ")\n";
    return kQuadrature;
  } catch (const Error& e) {
    err << "plcp: " << e.what() << '\n';
    switch (e.code()) {
      case Errc::TBeyondClip:
      case Errc::UnknownLine:
      case Errc::DegenerateAngles:
        return kRuntime;
      default:
        return kConfig;
    }
  } catch (const std::exception& e) {
    err << "plcp: " << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}

}  // namespace plcp::cli

#endif  // PLCP_TOOLS_CLI_HPP
