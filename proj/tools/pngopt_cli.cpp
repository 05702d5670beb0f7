// pngopt: pulse-and-glide analysis from the command line.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 numerical or I/O failure.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pngopt/config.hpp"
#include "pngopt/io.hpp"
#include "pngopt/linear_analysis.hpp"
#include "pngopt/svg.hpp"
#include "pngopt/trajectory_opt.hpp"
#include "pngopt/vehicle_model.hpp"

namespace {

using namespace pngopt;

constexpr int kUsage = 1;
constexpr int kFailure = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text(path, text);
  }
}

void warn_if_out_of_domain(const EvaluationResult& e) {
  if (!(e.min_x1 > 0)) {
    std::cerr << "warning: velocity reached " << e.min_x1
              << " m/s; the vehicle model is only valid for positive speed\n";
  }
}

struct Options {
  std::string config;

  double speed = 15.0;
  double r_min = 1e-8;
  double r_max = 1e2;
  std::size_t points = 200;

  double v_min = 2.0;
  double v_max = 32.0;
  double v_step = 1.0;

  double jerk_weight = 3e-4;
  std::optional<double> c_override;
  std::size_t harmonics = 1;
  std::size_t steps = 4096;
  std::optional<double> omega0, a1, b1, x1_0, x2_0;

  std::string input;
  std::string csv;
  std::string json;
  std::string svg;
};

int run_equilibrium(const Options& o, const ModelConfig& cfg) {
  if (!(o.speed > 0)) throw UsageError("--speed must be positive");
  emit(to_json(equilibrium_for_speed(o.speed, cfg.vehicle, cfg.bsfc)).dump(2) + "\n", o.json);
  return 0;
}

int run_locus(const Options& o, const ModelConfig& cfg) {
  if (!(o.speed > 0)) throw UsageError("--speed must be positive");
  if (!(o.r_min > 0) || !(o.r_max > o.r_min) || o.points < 2) {
    throw UsageError("need 0 < --r-min < --r-max and --points >= 2");
  }
  const auto locus = root_locus(o.speed, log_grid(o.r_min, o.r_max, o.points), cfg.vehicle, cfg.bsfc);
  emit(locus_csv(locus), o.csv);
  if (!o.svg.empty()) svg::emit_svg(svg::PlotKind::Locus, locus, o.svg, o.speed);
  return 0;
}

int run_rcrit(const Options& o, const ModelConfig& cfg) {
  if (!(o.v_min > 0) || !(o.v_max >= o.v_min) || !(o.v_step > 0)) {
    throw UsageError("need 0 < --v-min <= --v-max and --step > 0");
  }
  std::vector<double> grid;
  const auto n = static_cast<std::size_t>(std::floor((o.v_max - o.v_min) / o.v_step + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) grid.push_back(o.v_min + o.v_step * static_cast<double>(i));
  const auto sweep = rcrit_sweep(grid, cfg.vehicle, cfg.bsfc);
  for (const auto& e : sweep) {
    if (!e.result) std::cerr << "gap at v = " << e.v << ": " << e.error << '\n';
  }
  emit(sweep_csv(sweep), o.csv);
  if (!o.svg.empty()) svg::emit_svg(svg::PlotKind::Sweep, sweep, o.svg);
  return 0;
}

int run_vcrit(const Options& o, const ModelConfig& cfg) {
  emit(nlohmann::json(find_v_crit(cfg.vehicle, cfg.bsfc)).dump() + "\n", o.json);
  return 0;
}

int run_optimize(const Options& o, const ModelConfig& cfg) {
  if (!(o.speed > 0)) throw UsageError("--speed must be positive");
  if (!(o.jerk_weight > 0)) throw UsageError("--r must be positive");
  if (o.harmonics < 1) throw UsageError("--harmonics must be >= 1");
  if (o.steps < 16) throw UsageError("--steps must be >= 16");

  const Equilibrium eq = equilibrium_for_speed(o.speed, cfg.vehicle, cfg.bsfc);
  const Weights w{o.c_override.value_or(eq.weight_c), o.jerk_weight};

  DecisionVector d0 = linear_seed(o.speed, o.jerk_weight, cfg.vehicle, cfg.bsfc);
  if (o.x1_0) d0.x1_0 = *o.x1_0;
  if (o.x2_0) d0.x2_0 = *o.x2_0;
  if (o.omega0) d0.input.omega = *o.omega0;
  if (o.a1) d0.input.a[0] = *o.a1;
  if (o.b1) d0.input.b[0] = *o.b1;

  OptimizeOptions opts;
  opts.steps = o.steps;
  const OptimizationResult first = optimize(d0, w, cfg.vehicle, cfg.bsfc, opts);
  std::vector<OptimizationResult> stages{first};
  if (o.harmonics > 1) {
    if (!first.converged) {
      std::cerr << "single-harmonic stage did not converge (" << first.message
                << "); skipping continuation\n";
    } else {
      stages = continuation(first, o.harmonics, w, cfg.vehicle, cfg.bsfc, opts);
    }
  }
  const OptimizationResult& last = stages.back();
  warn_if_out_of_domain(last.eval);

  nlohmann::json doc = to_json(last);
  doc["speed_mps"] = o.speed;
  doc["weights"] = {{"speed_weight_c", w.speed_weight}, {"jerk_weight_r", w.jerk_weight}};
  doc["steady_cost"] = steady_cost(o.speed, w.speed_weight, cfg.vehicle, cfg.bsfc);
  doc["steps"] = o.steps;
  doc["initial_guess"] = to_json(d0);
  nlohmann::json seq = nlohmann::json::array();
  for (const auto& s : stages) {
    seq.push_back({{"harmonics", s.decision.input.harmonics()},
                   {"j_total", s.eval.j_total},
                   {"omega", s.decision.input.omega},
                   {"r_x1", s.eval.r_x1},
                   {"r_x2", s.eval.r_x2},
                   {"min_x2", s.eval.min_x2},
                   {"converged", s.converged}});
  }
  doc["continuation"] = seq;

  emit(doc.dump(2) + "\n", o.json);
  write_text(o.csv.empty() ? "trajectory.csv" : o.csv, trajectory_csv(last.eval, cfg.bsfc));
  if (!o.svg.empty()) svg::emit_svg(svg::PlotKind::Trajectory, last.eval, o.svg);
  if (!last.converged) {
    std::cerr << "optimization did not converge: " << last.message << '\n';
    return kFailure;
  }
  return 0;
}

int run_simulate(const Options& o, const ModelConfig& cfg) {
  if (o.input.empty()) throw UsageError("--input is required");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text(o.input));
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError(std::string("invalid JSON input: ") + e.what());
  }
  DecisionVector d;
  try {
    d = decision_from_json(doc);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  std::size_t steps = o.steps;
  if (doc.contains("steps") && doc["steps"].is_number_unsigned()) steps = doc["steps"].get<std::size_t>();
  if (steps < 16) throw UsageError("--steps must be >= 16");
  // Weights only affect the cost breakdown, not the trajectory columns.
  const EvaluationResult e = evaluate(d, Weights{}, cfg.vehicle, cfg.bsfc, steps);
  warn_if_out_of_domain(e);
  emit(trajectory_csv(e, cfg.bsfc), o.csv);
  if (!o.svg.empty()) svg::emit_svg(svg::PlotKind::Trajectory, e, o.svg);
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pulse-and-glide optimal control analysis"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--config", o.config, "JSON vehicle/bsfc parameter file")->check(CLI::ExistingFile);

  auto* eq = app.add_subcommand("equilibrium", "Cruise equilibrium and speed weight C");
  eq->add_option("--speed", o.speed, "nominal speed [m/s]")->required();
  eq->add_option("--json", o.json, "output path (default stdout)");

  auto* locus = app.add_subcommand("locus", "Root locus over the jerk weight R");
  locus->add_option("--speed", o.speed, "nominal speed [m/s]")->required();
  locus->add_option("--r-min", o.r_min, "smallest R")->capture_default_str();
  locus->add_option("--r-max", o.r_max, "largest R")->capture_default_str();
  locus->add_option("--points", o.points, "logarithmic grid size")->capture_default_str();
  locus->add_option("--csv", o.csv, "CSV output path (default stdout)");
  locus->add_option("--svg", o.svg, "SVG plot path");

  auto* rcrit = app.add_subcommand("rcrit", "Critical jerk weight and PnG period over speed");
  rcrit->add_option("--v-min", o.v_min, "lowest speed [m/s]")->capture_default_str();
  rcrit->add_option("--v-max", o.v_max, "highest speed [m/s]")->capture_default_str();
  rcrit->add_option("--step", o.v_step, "speed step [m/s]")->capture_default_str();
  rcrit->add_option("--csv", o.csv, "CSV output path (default stdout)");
  rcrit->add_option("--svg", o.svg, "SVG plot path");

  auto* vcrit = app.add_subcommand("vcrit", "Speed above which PnG is never locally optimal");
  vcrit->add_option("--json", o.json, "output path (default stdout)");

  auto* opt = app.add_subcommand("optimize", "Direct Fourier-parameterized trajectory optimization");
  opt->add_option("--speed", o.speed, "nominal speed [m/s]")->required();
  opt->add_option("--r", o.jerk_weight, "jerk weight R")->capture_default_str();
  opt->add_option("--c", o.c_override, "speed weight C [g/m] (default: from the equilibrium)");
  opt->add_option("--harmonics", o.harmonics, "number of harmonics K")->capture_default_str();
  opt->add_option("--steps", o.steps, "integration steps per period")->capture_default_str();
  opt->add_option("--omega0", o.omega0, "initial fundamental [rad/s]");
  opt->add_option("--a1", o.a1, "initial sine coefficient [N/s]");
  opt->add_option("--b1", o.b1, "initial cosine coefficient [N/s]");
  opt->add_option("--x1-0", o.x1_0, "initial speed [m/s]");
  opt->add_option("--x2-0", o.x2_0, "initial force [N]");
  opt->add_option("--json", o.json, "result JSON path (default stdout)");
  opt->add_option("--csv", o.csv, "trajectory CSV path (default trajectory.csv)");
  opt->add_option("--svg", o.svg, "SVG plot path");

  auto* sim = app.add_subcommand("simulate", "Simulate one period of a Fourier input");
  sim->add_option("--input", o.input, "decision JSON (as written by optimize)")->required();
  sim->add_option("--steps", o.steps, "integration steps (default: from input, else 4096)");
  sim->add_option("--csv", o.csv, "CSV output path (default stdout)");
  sim->add_option("--svg", o.svg, "SVG plot path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  ModelConfig cfg;
  try {
    if (!o.config.empty()) cfg = load_config(o.config);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*eq) return run_equilibrium(o, cfg);
    if (*locus) return run_locus(o, cfg);
    if (*rcrit) return run_rcrit(o, cfg);
    if (*vcrit) return run_vcrit(o, cfg);
    if (*opt) return run_optimize(o, cfg);
    if (*sim) return run_simulate(o, cfg);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}
