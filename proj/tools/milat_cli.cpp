// Command-line front end: resonance scans, existence certificates,
// asymptotic predictions, Galerkin solves, continuation runs, Floquet
// analysis and direct simulation. One command per invocation; JSON
// config with --set overrides; data to --out files or standard output,
// diagnostics to standard error.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "milat/asymptotics.hpp"
#include "milat/errors.hpp"
#include "milat/existence.hpp"
#include "milat/floquet.hpp"
#include "milat/galerkin.hpp"
#include "milat/model.hpp"
#include "milat/trig_series.hpp"

namespace {

using nlohmann::json;

struct Options {
  std::string config_path;
  std::string out_dir;
  int jobs = 1;
  std::vector<std::string> overrides;
};

json load_config(const Options& opts) {
  json config = json::object();
  if (!opts.config_path.empty()) {
    std::ifstream in(opts.config_path);
    if (!in) throw milat::InvalidArgument("cannot open config: " + opts.config_path);
    config = json::parse(in);
  }
  for (const auto& kv : opts.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw milat::InvalidArgument("--set expects key=value, got: " + kv);
    const std::string key = kv.substr(0, eq);
    const std::string raw = kv.substr(eq + 1);
    json value;
    try {
      value = json::parse(raw);
    } catch (const json::exception&) {
      value = raw;  // bare strings allowed without quotes
    }
    // Dotted path into the config tree.
    json* node = &config;
    std::istringstream path(key);
    std::string part, prev;
    bool have_prev = false;
    while (std::getline(path, part, '.')) {
      if (have_prev) node = &((*node)[prev]);
      prev = part;
      have_prev = true;
    }
    if (!have_prev) throw milat::InvalidArgument("--set: empty key");
    (*node)[prev] = value;
  }
  return config;
}

milat::ModelParams params_from(const json& config) {
  if (!config.contains("params"))
    throw milat::InvalidArgument("config.params: missing");
  auto params = milat::ModelParams::from_json(config.at("params"));
  params.validate();
  return params;
}

void emit(const Options& opts, const std::string& filename, const std::string& content) {
  if (opts.out_dir.empty()) {
    std::cout << content;
    if (!content.empty() && content.back() != '\n') std::cout << '\n';
    return;
  }
  std::filesystem::create_directories(opts.out_dir);
  const auto path = std::filesystem::path(opts.out_dir) / filename;
  std::ofstream out(path);
  if (!out) throw milat::InvalidArgument("cannot write " + path.string());
  out << content;
  std::cerr << "wrote " << path.string() << '\n';
}

const json& block(const json& config, const char* name) {
  static const json empty = json::object();
  return config.contains(name) ? config.at(name) : empty;
}

template <typename T>
T get_or(const json& b, const char* key, T fallback) {
  return b.contains(key) ? b.at(key).get<T>() : fallback;
}

int default_J(const milat::ModelParams& params) {
  return std::max(8, 4 * params.h.k_max());
}

milat::TrigSeries initial_guess(const milat::ModelParams& params, int J) {
  try {
    return milat::invert_K(params, params.h).projected(J);
  } catch (const milat::SingularSymbol&) {
    return milat::TrigSeries::zero(J);
  }
}

int run_resonances(const Options& opts, const json& config) {
  const auto params = params_from(config);
  const int k_limit = get_or(block(config, "resonances"), "k_limit", 64);
  const auto report = milat::resonance_scan(params, k_limit);
  emit(opts, "resonances.json", milat::to_json(report).dump(2));
  return 0;
}

int run_theta(const Options& opts, const json& config) {
  const auto params = params_from(config);
  emit(opts, "theta.json", milat::to_json(milat::theta(params)).dump(2));
  return 0;
}

int run_certify(const Options& opts, const json& config) {
  const auto params = params_from(config);
  emit(opts, "certificate.json", milat::certify(params).to_json().dump(2));
  return 0;
}

int run_solve_contraction(const Options& opts, const json& config) {
  const auto params = params_from(config);
  const json& b = block(config, "contraction");
  milat::ContractionOptions copts;
  copts.tol = get_or(b, "tol", copts.tol);
  copts.max_iterations = get_or(b, "max_iterations", copts.max_iterations);
  copts.k_work = get_or(b, "k_work", copts.k_work);
  copts.bypass_admissibility = get_or(b, "bypass_admissibility", false);
  const auto result = milat::solve_contraction(params, copts);
  const json out = {{"series", result.U.to_json()},
                    {"iterations", result.iterations},
                    {"residual", result.residual},
                    {"observed_rate", result.observed_rate}};
  emit(opts, "contraction.json", out.dump(2));
  return 0;
}

int pick_k0(const milat::ModelParams& params, const json& b) {
  if (b.contains("k0")) return b.at("k0").get<int>();
  const auto report = milat::resonance_scan(params);
  for (int k : report.resonant_modes)
    if (k > 0) return k;
  throw milat::InvalidArgument("asymptotics.k0: missing and no resonant mode found");
}

int run_asymptotics(const Options& opts, const json& config) {
  const auto params = params_from(config);
  const json& b = block(config, "asymptotics");
  const int k0 = pick_k0(params, b);
  const bool h_scaled = get_or(b, "h_scaled", false);
  const std::string branch = get_or<std::string>(b, "branch", "auto");
  const int sign_eps = get_or(b, "sign_eps", 1);

  milat::BranchPrediction prediction =
      branch == "sqrt" ? milat::predict_sqrt(params, k0, sign_eps)
                       : milat::predict(params, k0, h_scaled);
  json out = prediction.to_json();
  const auto coeffs = milat::bif_coefficients(params, k0);
  const auto th = milat::branch_discriminant(coeffs, params.gamma, params.omega, k0);
  const auto mu0 = milat::mu0_thresholds(coeffs, params.gamma, params.omega, k0);
  out["thresholds"] = {{"value", th.value},
                       {"negative", th.negative},
                       {"small_positive", th.small_positive},
                       {"mu0_lower", mu0.lower},
                       {"mu0_upper", mu0.upper}};
  emit(opts, "asymptotics.json", out.dump(2));
  return 0;
}

int run_solve(const Options& opts, const json& config) {
  const auto params = params_from(config);
  const json& b = block(config, "solve");
  const int J = get_or(b, "J", default_J(params));
  const double tol = get_or(b, "tol", 1e-11);
  const int max_iter = get_or(b, "max_iter", 50);
  milat::TrigSeries init = b.contains("initial")
                               ? milat::TrigSeries::from_json(b.at("initial"))
                               : initial_guess(params, J);
  const auto solution = milat::newton_solve(params, init, J, tol, max_iter);
  emit(opts, "solution.json", solution.to_json().dump(2));
  return 0;
}

int run_continue(const Options& opts, const json& config) {
  const auto params = params_from(config);
  const json& b = block(config, "continue");
  if (!b.contains("h_shape"))
    throw milat::InvalidArgument("continue.h_shape: missing");
  const auto h_shape = milat::TrigSeries::from_json(b.at("h_shape"));
  const double h0_start = get_or(b, "h0_start", 1e-3);
  const double h0_min = get_or(b, "h0_min", 0.0);
  const double h0_max = get_or(b, "h0_max", 1.0);
  const int J = get_or(b, "J", std::max(default_J(params), 4 * h_shape.k_max()));

  milat::StepControls controls;
  controls.initial_step = get_or(b, "initial_step", controls.initial_step);
  controls.min_step = get_or(b, "min_step", controls.min_step);
  controls.max_step = get_or(b, "max_step", controls.max_step);
  controls.max_points = get_or(b, "max_points", controls.max_points);
  controls.tol = get_or(b, "tol", controls.tol);
  controls.validate_two_J = get_or(b, "validate_two_J", controls.validate_two_J);
  controls.two_J_tol = get_or(b, "two_J_tol", controls.two_J_tol);

  const auto curve =
      milat::continue_in_h0(params, h_shape, h0_start, h0_min, h0_max, J, controls);
  std::ostringstream csv;
  milat::write_curve_csv(curve, csv);
  emit(opts, "curve.csv", csv.str());

  std::cerr << "points=" << curve.points.size() << " folds=" << curve.folds.size();
  for (double f : curve.folds) std::cerr << ' ' << std::setprecision(17) << f;
  std::cerr << (curve.stopped_invalid ? " (stopped: two-J validation)" : "") << '\n';
  return 0;
}

int run_floquet(const Options& opts, const json& config) {
  const auto params = params_from(config);
  const json& b = block(config, "floquet");
  if (!b.contains("N")) throw milat::InvalidArgument("floquet.N: missing");
  const int N = b.at("N").get<int>();
  const int steps = get_or(b, "steps_per_period", 2000);
  const double tol_margin = get_or(b, "tol_margin", 1e-6);

  milat::TrigSeries wave(0);
  if (b.contains("wave")) {
    wave = milat::TrigSeries::from_json(b.at("wave"));
  } else {
    const int J = get_or(b, "J", default_J(params));
    wave = milat::newton_solve(params, initial_guess(params, J), J).series;
    std::cerr << "floquet: wave solved, residual via Galerkin at J=" << J << '\n';
  }

  const auto result = milat::monodromy(params, wave, N, steps, tol_margin);
  emit(opts, "floquet.json", result.to_json().dump(2));
  if (!opts.out_dir.empty()) {
    std::ostringstream csv;
    csv << "modulus,phase\n";
    char line[80];
    for (const auto& m : result.multipliers) {
      std::snprintf(line, sizeof line, "%.17g,%.17g\n", std::abs(m), std::arg(m));
      csv << line;
    }
    emit(opts, "multipliers.csv", csv.str());
  }
  return 0;
}

int run_simulate(const Options& opts, const json& config) {
  const auto params = params_from(config);
  const json& b = block(config, "simulate");
  if (!b.contains("N")) throw milat::InvalidArgument("simulate.N: missing");
  const int N = b.at("N").get<int>();
  const double duration = get_or(b, "duration", 100.0);
  const double dt = get_or(b, "dt", 1e-3);

  milat::LatticeState initial = milat::LatticeState::zero(N);
  std::optional<milat::TrigSeries> wave;
  if (b.contains("wave")) {
    wave = milat::TrigSeries::from_json(b.at("wave"));
    initial = milat::LatticeState::from_wave(params, *wave, N);
  }

  std::ostringstream csv;
  csv << std::setprecision(17);
  milat::SimulateOptions sopts;
  sopts.blowup_ceiling = get_or(b, "ceiling", sopts.blowup_ceiling);
  sopts.snapshot_stride = get_or(b, "stride", sopts.snapshot_stride);
  sopts.snapshot_out = &csv;
  if (wave) sopts.reference_wave = &*wave;

  const auto summary = milat::simulate(params, initial, duration, dt, sopts);
  emit(opts, "trajectory.csv", csv.str());
  const json report = {{"blow_up", summary.blow_up},
                       {"max_abs_u", summary.max_abs_u},
                       {"max_deviation", summary.max_deviation},
                       {"final_time", summary.final_time},
                       {"steps", summary.steps}};
  std::cerr << report.dump() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"travelling waves of the driven magneto-inductive lattice"};
  app.require_subcommand(1);
  app.fallthrough();  // accept the global flags after the subcommand too

  Options opts;
  app.add_option("--config", opts.config_path, "JSON config file");
  app.add_option("--out", opts.out_dir, "output directory (default: stdout)");
  app.add_option("--jobs", opts.jobs, "worker threads for batch phases")
      ->check(CLI::PositiveNumber);
  app.add_option("--set", opts.overrides, "dotted-path config override, key=value");

  int (*handler)(const Options&, const json&) = nullptr;
  auto add = [&](const char* name, const char* desc,
                 int (*fn)(const Options&, const json&)) {
    app.add_subcommand(name, desc)->callback([&handler, fn] { handler = fn; });
  };
  add("resonances", "enumerate resonant modes and non-degeneracy conditions", run_resonances);
  add("theta", "lower bound on the linear symbol", run_theta);
  add("certify", "existence/admissibility certificate", run_certify);
  add("solve-contraction", "fixed-point solve inside the certified ball",
      run_solve_contraction);
  add("asymptotics", "leading-order bifurcation branches", run_asymptotics);
  add("solve", "Galerkin-Newton solve", run_solve);
  add("continue", "pseudo-arclength continuation in h0", run_continue);
  add("floquet", "Floquet multipliers of a travelling wave on a ring", run_floquet);
  add("simulate", "direct time integration of the lattice", run_simulate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const json config = load_config(opts);
    return handler(opts, config);
  } catch (const milat::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: config: " << e.what() << '\n';
    return 2;
  } catch (const milat::Error& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
