// Command line front end: seeded, scriptable runs of the demo problems and
// the three numerical studies, plus generic problem-file runs.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical divergence,
// 4 non-convergence within the iteration cap.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "supr/engines.hpp"
#include "supr/experiments.hpp"
#include "supr/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace supr;

namespace {

struct CommonOptions {
  std::string out_dir = "out";
  std::string config_file;
  std::string format = "csv";  // csv: report + CSV artifacts; json: report only
  std::string trace_mode = "summary";
  std::uint64_t seed = 1;
  bool paper_scale = false;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--out", opts.out_dir, "Output directory");
  cmd->add_option("--config", opts.config_file, "JSON config file");
  cmd->add_option("--format", opts.format, "Artifact format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--trace", opts.trace_mode, "Trace granularity")
      ->check(CLI::IsMember({"full", "summary"}));
  cmd->add_option("--seed", opts.seed, "Master seed");
  cmd->add_flag("--paper-scale", opts.paper_scale,
                "Run at the full published problem sizes");
}

json load_config(const CommonOptions& opts) {
  if (opts.config_file.empty()) return json::object();
  std::ifstream in(opts.config_file);
  if (!in) throw ConfigError("cannot open config file " + opts.config_file);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("cannot parse config file: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  return j;
}

TraceMode parse_trace_mode(const std::string& mode) {
  return mode == "full" ? TraceMode::full : TraceMode::summary;
}

Vector parse_point(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) values.push_back(std::stod(cell));
  if (values.empty()) throw ConfigError("empty point literal");
  Vector v(static_cast<Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) v[static_cast<Index>(i)] = values[i];
  return v;
}

Vector json_point(const json& j, const char* what) {
  if (!j.is_array()) throw ConfigError(std::string(what) + " must be an array");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Index>(i)] = j[i].get<double>();
  return v;
}

fs::path prepare_out_dir(const CommonOptions& opts) {
  fs::path dir(opts.out_dir);
  fs::create_directories(dir);
  return dir;
}

void emit_timings(const fs::path& dir,
                  const std::vector<std::pair<std::string, double>>& entries) {
  // Wall times live in a sidecar so report.json stays byte-identical across
  // repeated seeded runs.
  io::write_text(dir / "timings.json", io::timings_json(entries));
  for (const auto& [name, seconds] : entries) {
    std::fprintf(stderr, "%-28s %8.3f s\n", name.c_str(), seconds);
  }
}

// ---------------------------------------------------------------------------

int cmd_demo_guarantee(const CommonOptions& opts, const CLI::App* cmd,
                       std::string start_text, int iterations, double alpha) {
  const json cfg = load_config(opts);
  Vector start = cfg.contains("start") ? json_point(cfg.at("start"), "start")
                                       : parse_point("0.3,0");
  if (cfg.contains("iterations") && cmd->count("--iterations") == 0) {
    iterations = cfg.at("iterations").get<int>();
  }
  if (cfg.contains("alpha") && cmd->count("--alpha") == 0) {
    alpha = cfg.at("alpha").get<double>();
  }
  if (cmd->count("--start") > 0) start = parse_point(start_text);

  const auto result = experiments::demo_guarantee(start, iterations, alpha);
  const fs::path dir = prepare_out_dir(opts);
  io::write_text(dir / "report.json", io::to_json(result));
  if (opts.format == "csv") {
    io::write_trace_csv(dir / "trace_basic.csv", result.basic);
    io::write_trace_csv(dir / "trace_superiorized.csv", result.superiorized);
  }
  emit_timings(dir, {{"basic", result.basic.wall_seconds},
                     {"superiorized", result.superiorized.wall_seconds}});
  std::printf("basic final: (%.12g, %.12g)\n", result.basic.final_iterate[0],
              result.basic.final_iterate[1]);
  std::printf("superiorized final: (%.12g, %.12g)\n",
              result.superiorized.final_iterate[0],
              result.superiorized.final_iterate[1]);
  return 0;
}

int cmd_exp1_balls(const CommonOptions& opts, const CLI::App* cmd,
                   int iterations) {
  const json cfg = load_config(opts);
  experiments::BallsConfig balls = experiments::BallsConfig::defaults();
  if (cfg.contains("center_a")) balls.center_a = json_point(cfg.at("center_a"), "center_a");
  if (cfg.contains("center_b")) balls.center_b = json_point(cfg.at("center_b"), "center_b");
  if (cfg.contains("radius_a")) balls.radius_a = cfg.at("radius_a").get<double>();
  if (cfg.contains("radius_b")) balls.radius_b = cfg.at("radius_b").get<double>();
  if (cfg.contains("start")) balls.start = json_point(cfg.at("start"), "start");
  if (cfg.contains("iterations")) balls.iterations = cfg.at("iterations").get<int>();
  if (cfg.contains("kernel_slow")) balls.kernel_slow = cfg.at("kernel_slow").get<double>();
  if (cfg.contains("kernel_fast")) balls.kernel_fast = cfg.at("kernel_fast").get<double>();
  if (cfg.contains("window")) balls.window = cfg.at("window").get<std::uint64_t>();
  if (cmd->count("--iterations") > 0) balls.iterations = iterations;

  const auto result = experiments::run_exp1_balls(balls);
  const fs::path dir = prepare_out_dir(opts);
  io::write_text(dir / "report.json", io::to_json(result));
  std::vector<std::pair<std::string, double>> timings;
  for (const auto& run : result.runs) {
    if (opts.format == "csv") {
      io::write_trace_csv(dir / ("trace_" + run.label + ".csv"), run.trace);
    }
    timings.emplace_back(run.label, run.trace.wall_seconds);
    std::printf("%-24s final norm %.9f\n", run.label.c_str(), run.final_norm);
  }
  emit_timings(dir, timings);
  return 0;
}

int cmd_exp1_mc(const CommonOptions& opts, const CLI::App* cmd, long runs,
                std::string kernels_text, int iterations, std::uint64_t window,
                int threads) {
  const json cfg = load_config(opts);
  experiments::MonteCarloConfig mc;
  mc.seed = opts.seed;
  if (opts.paper_scale) {
    mc.runs = 1000000;
    mc.kernels = {0.5, 0.6, 0.7, 0.8, 0.9};
  }
  if (cfg.contains("runs")) mc.runs = cfg.at("runs").get<long>();
  if (cfg.contains("kernels")) mc.kernels = cfg.at("kernels").get<std::vector<double>>();
  if (cfg.contains("iterations")) mc.iterations = cfg.at("iterations").get<int>();
  if (cfg.contains("window")) mc.window = cfg.at("window").get<std::uint64_t>();
  if (cfg.contains("threads")) mc.threads = cfg.at("threads").get<int>();
  if (cmd->count("--runs") > 0) mc.runs = runs;
  if (cmd->count("--kernels") > 0) {
    mc.kernels.clear();
    std::stringstream ss(kernels_text);
    std::string cell;
    while (std::getline(ss, cell, ',')) mc.kernels.push_back(std::stod(cell));
  }
  if (cmd->count("--iterations") > 0) mc.iterations = iterations;
  if (cmd->count("--window") > 0) mc.window = window;
  if (cmd->count("--threads") > 0) mc.threads = threads;

  const auto t0 = std::chrono::steady_clock::now();
  const auto report = experiments::run_exp1_montecarlo(mc);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const fs::path dir = prepare_out_dir(opts);
  io::write_text(dir / "report.json", io::to_json(report));
  if (opts.format == "csv") {
    io::write_text(dir / "table1.csv", io::montecarlo_table_csv(report));
  }
  emit_timings(dir, {{"montecarlo", elapsed}});
  std::fputs(io::montecarlo_table_csv(report).c_str(), stdout);
  return 0;
}

int cmd_exp2(const CommonOptions& opts, const CLI::App* cmd,
             std::string start_text, int iterations, bool literal) {
  const json cfg = load_config(opts);
  experiments::Exp2Config e2 = experiments::Exp2Config::defaults();
  if (cfg.contains("start")) e2.start = json_point(cfg.at("start"), "start");
  if (cfg.contains("iterations")) e2.iterations = cfg.at("iterations").get<int>();
  if (cfg.contains("alpha")) e2.alpha = cfg.at("alpha").get<double>();
  if (cfg.contains("literal_x_direction")) {
    e2.literal_x_direction = cfg.at("literal_x_direction").get<bool>();
  }
  if (cmd->count("--start") > 0) e2.start = parse_point(start_text);
  if (cmd->count("--iterations") > 0) e2.iterations = iterations;
  if (literal) e2.literal_x_direction = true;

  const auto result = experiments::run_exp2(e2);
  const fs::path dir = prepare_out_dir(opts);
  io::write_text(dir / "report.json", io::to_json(result));
  if (opts.format == "csv") {
    io::write_trace_csv(dir / "trace_basic.csv", result.basic);
    io::write_trace_csv(dir / "trace_superiorized.csv", result.superiorized);
  }
  emit_timings(dir, {{"basic", result.basic.wall_seconds},
                     {"superiorized", result.superiorized.wall_seconds}});
  std::printf("basic x: (%.9f, %.9f)  superiorized x: (%.9f, %.9f)\n",
              result.basic_x[0], result.basic_x[1], result.sup_x[0],
              result.sup_x[1]);
  return 0;
}

int cmd_exp3_gen(const CommonOptions& opts, const CLI::App* cmd, Index side,
                 Index beamlets, Index tumors, Index tumor_pixels) {
  const json cfg = load_config(opts);
  experiments::ImrtPhantomSpec spec = opts.paper_scale
                                          ? experiments::ImrtPhantomSpec::paper()
                                          : experiments::ImrtPhantomSpec::desk();
  if (cfg.contains("side")) spec.side = cfg.at("side").get<Index>();
  if (cfg.contains("beamlets")) spec.beamlets = cfg.at("beamlets").get<Index>();
  if (cfg.contains("tumors")) spec.tumors = cfg.at("tumors").get<Index>();
  if (cfg.contains("tumor_pixels")) spec.tumor_pixels = cfg.at("tumor_pixels").get<Index>();
  if (cmd->count("--side") > 0) spec.side = side;
  if (cmd->count("--beamlets") > 0) spec.beamlets = beamlets;
  if (cmd->count("--tumors") > 0) spec.tumors = tumors;
  if (cmd->count("--tumor-pixels") > 0) spec.tumor_pixels = tumor_pixels;

  const auto t0 = std::chrono::steady_clock::now();
  const auto inst = experiments::gen_imrt_instance(opts.seed, spec);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const fs::path dir = prepare_out_dir(opts);
  io::save_imrt_instance(dir, inst);

  json j;
  j["seed"] = inst.seed;
  j["side"] = inst.side;
  j["beamlets"] = inst.beamlets;
  json sizes = json::array();
  for (const auto& t : inst.tumors) sizes.push_back(t.size());
  j["tumor_sizes"] = sizes;
  j["organ_bounds"] = json::array({inst.organ_lower, inst.organ_upper});
  j["intensity_bounds"] =
      json::array({inst.intensity_lower, inst.intensity_upper});
  io::write_text(dir / "report.json", j.dump(2) + "\n");
  emit_timings(dir, {{"generate", elapsed}});
  std::printf("instance written to %s\n", dir.string().c_str());
  return 0;
}

int cmd_exp3_run(const CommonOptions& opts, const CLI::App* cmd,
                 std::string instance_path, std::string algos_text,
                 double prox_threshold, long max_iterations, bool pgm) {
  const json cfg = load_config(opts);
  if (cfg.contains("proximity_threshold") && cmd->count("--prox") == 0) {
    prox_threshold = cfg.at("proximity_threshold").get<double>();
  }
  if (cfg.contains("max_iterations") && cmd->count("--max-iterations") == 0) {
    max_iterations = cfg.at("max_iterations").get<long>();
  }

  experiments::ImrtInstance inst;
  if (!instance_path.empty()) {
    inst = io::load_imrt_instance(instance_path);
  } else {
    const auto spec = opts.paper_scale ? experiments::ImrtPhantomSpec::paper()
                                       : experiments::ImrtPhantomSpec::desk();
    inst = experiments::gen_imrt_instance(opts.seed, spec);
  }

  std::vector<experiments::ImrtAlgorithm> algos;
  {
    std::stringstream ss(algos_text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      if (cell == "basic") {
        algos.push_back(experiments::ImrtAlgorithm::basic);
      } else if (cell == "superiorized") {
        algos.push_back(experiments::ImrtAlgorithm::superiorized);
      } else if (cell == "superiorized_restarts") {
        algos.push_back(experiments::ImrtAlgorithm::superiorized_restarts);
      } else {
        throw ConfigError("unknown algorithm \"" + cell + "\"");
      }
    }
  }
  if (algos.empty()) throw ConfigError("no algorithms requested");

  RunConfig base;
  base.proximity_threshold = prox_threshold;
  base.max_outer_iterations = max_iterations;
  base.trace = parse_trace_mode(opts.trace_mode);

  const auto report = experiments::run_exp3(inst, algos, opts.seed, base);
  const fs::path dir = prepare_out_dir(opts);
  io::write_text(dir / "report.json", io::to_json(report));
  std::vector<std::pair<std::string, double>> timings;
  for (const auto& run : report.runs) {
    const std::string label = experiments::to_string(run.algorithm);
    if (opts.format == "csv") {
      io::write_trace_csv(dir / ("trace_" + label + ".csv"), run.trace);
      io::write_grid_csv(dir / ("heatmap_" + label + ".csv"),
                         experiments::dose_grid(inst, run.final_y));
      if (pgm) {
        io::write_grid_pgm(dir / ("heatmap_" + label + ".pgm"),
                           experiments::dose_grid(inst, run.final_y));
      }
    }
    timings.emplace_back(label, run.wall_seconds);
    std::printf("%-24s iterations %6ld  %s", label.c_str(), run.iterations,
                run.reason == StopReason::proximity ? "converged " : "CAP HIT   ");
    for (const double tv : run.tumor_tv) std::printf("  tv %.2f", tv);
    std::printf("\n");
  }
  emit_timings(dir, timings);
  if (!report.all_converged) {
    std::fprintf(stderr, "at least one run hit the iteration cap\n");
    return 4;
  }
  return 0;
}

int cmd_run(const CommonOptions& opts) {
  if (opts.config_file.empty()) {
    throw ConfigError("run requires --config <file>");
  }
  io::GenericRun spec = io::load_generic_run(opts.config_file);
  spec.run.trace = parse_trace_mode(opts.trace_mode);

  const AlgorithmicOperator op = build_mssfp_operator(spec.problem);
  const Vector x0 = spec.start.value_or(Vector::Zero(spec.problem.n()));

  IterationTrace trace;
  if (spec.algorithm == "basic") {
    trace = run_smp_basic(spec.problem, op, x0, spec.run);
  } else {
    auto schedule = io::make_schedule(spec.schedule);
    trace = run_smp_superiorized(spec.problem, op, *schedule, x0, spec.run);
  }

  const fs::path dir = prepare_out_dir(opts);
  json j;
  j["algorithm"] = spec.algorithm;
  j["result"] = json::parse(io::trace_summary_json(trace));
  const Index n = spec.problem.n();
  if (trace.final_iterate.size() <= 256) {
    json x = json::array(), y = json::array();
    for (Index i = 0; i < n; ++i) x.push_back(trace.final_iterate[i]);
    for (Index i = n; i < trace.final_iterate.size(); ++i) {
      y.push_back(trace.final_iterate[i]);
    }
    j["x"] = std::move(x);
    j["y"] = std::move(y);
  }
  io::write_text(dir / "report.json", j.dump(2) + "\n");
  if (opts.format == "csv") {
    io::write_trace_csv(dir / "trace.csv", trace);
  }
  emit_timings(dir, {{spec.algorithm, trace.wall_seconds}});
  std::printf("%s: %ld iterations, %s\n", spec.algorithm.c_str(),
              trace.iterations,
              trace.reason == StopReason::proximity ? "converged" : "cap hit");
  if (spec.run.proximity_threshold.has_value() &&
      trace.reason == StopReason::max_iterations) {
    return 4;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feasibility-seeking projection methods with superiorized "
               "perturbations: demos, randomized studies and generic runs"};
  app.require_subcommand(1);

  CommonOptions opts;

  auto* demo = app.add_subcommand("demo-guarantee",
                                  "Two half-spaces: alternating projections "
                                  "against the superiorized version");
  std::string demo_start = "0.3,0";
  int demo_iterations = 50;
  double demo_alpha = 0.5;
  demo->add_option("--start", demo_start, "Start point, comma separated");
  demo->add_option("--iterations", demo_iterations, "Outer iterations");
  demo->add_option("--alpha", demo_alpha, "Step kernel");
  add_common(demo, opts);

  auto* balls = app.add_subcommand("exp1-balls",
                                   "Min-norm point in two balls, four methods");
  int balls_iterations = 500;
  balls->add_option("--iterations", balls_iterations, "Outer iterations");
  add_common(balls, opts);

  auto* mc = app.add_subcommand("exp1-mc",
                                "Monte Carlo over random half-space pairs");
  long mc_runs = 10000;
  std::string mc_kernels = "0.5,0.9";
  int mc_iterations = 1000000;
  std::uint64_t mc_window = 20;
  int mc_threads = 0;
  mc->add_option("--runs", mc_runs, "Instance count");
  mc->add_option("--kernels", mc_kernels, "Comma separated kernels");
  mc->add_option("--iterations", mc_iterations, "Iteration safety cap per run");
  mc->add_option("--window", mc_window, "Restart window");
  mc->add_option("--threads", mc_threads, "Worker threads (0 = hardware)");
  add_common(mc, opts);

  auto* exp2 = app.add_subcommand("exp2", "Planar split minimization instance");
  std::string exp2_start = "7,4";
  int exp2_iterations = 50;
  bool exp2_literal = false;
  exp2->add_option("--start", exp2_start, "x-space start point");
  exp2->add_option("--iterations", exp2_iterations, "Outer iterations");
  exp2->add_flag("--literal-x-direction", exp2_literal,
                 "Use the (0, +1) x-perturbation direction");
  add_common(exp2, opts);

  auto* gen = app.add_subcommand("exp3-gen", "Generate a dose-planning instance");
  Index gen_side = 20, gen_beamlets = 460, gen_tumors = 2, gen_pixels = 32;
  gen->add_option("--side", gen_side, "Cross-section side in pixels");
  gen->add_option("--beamlets", gen_beamlets, "Beamlet count");
  gen->add_option("--tumors", gen_tumors, "Tumor structure count");
  gen->add_option("--tumor-pixels", gen_pixels, "Pixels per tumor structure");
  add_common(gen, opts);

  auto* run3 = app.add_subcommand("exp3-run", "Run algorithms on an instance");
  std::string run3_instance;
  std::string run3_algos = "basic,superiorized,superiorized_restarts";
  double run3_prox = 0.01;
  long run3_cap = 100000;
  bool run3_pgm = false;
  run3->add_option("--instance", run3_instance,
                   "Instance directory or instance.json (default: generate)");
  run3->add_option("--algos", run3_algos, "Comma separated algorithm list");
  run3->add_option("--prox", run3_prox, "Proximity stop threshold");
  run3->add_option("--max-iterations", run3_cap, "Outer iteration cap");
  run3->add_flag("--pgm", run3_pgm, "Also write grayscale heat maps");
  add_common(run3, opts);

  auto* runcmd = app.add_subcommand("run", "Run a problem file");
  add_common(runcmd, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (demo->parsed()) {
      return cmd_demo_guarantee(opts, demo, demo_start, demo_iterations,
                                demo_alpha);
    }
    if (balls->parsed()) return cmd_exp1_balls(opts, balls, balls_iterations);
    if (mc->parsed()) {
      return cmd_exp1_mc(opts, mc, mc_runs, mc_kernels, mc_iterations,
                         mc_window, mc_threads);
    }
    if (exp2->parsed()) {
      return cmd_exp2(opts, exp2, exp2_start, exp2_iterations, exp2_literal);
    }
    if (gen->parsed()) {
      return cmd_exp3_gen(opts, gen, gen_side, gen_beamlets, gen_tumors,
                          gen_pixels);
    }
    if (run3->parsed()) {
      return cmd_exp3_run(opts, run3, run3_instance, run3_algos, run3_prox,
                          run3_cap, run3_pgm);
    }
    if (runcmd->parsed()) return cmd_run(opts);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const DivergenceError& e) {
    std::fprintf(stderr, "numerical divergence: %s\n", e.what());
    return 3;
  } catch (const NonConvergenceError& e) {
    std::fprintf(stderr, "non-convergence: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
