#include "supr/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <thread>
#include <utility>

#include "supr/rng.hpp"

namespace supr::experiments {

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// Guarantee demo

AlgorithmicOperator make_guarantee_operator() {
  // {x1 + x2 >= 1} written as <(-1,-1), x> <= -1, then {x1 - x2 <= 0}.
  auto a = std::make_shared<HalfSpace>(vec2(-1.0, -1.0), -1.0);
  auto b = std::make_shared<HalfSpace>(vec2(1.0, -1.0), 0.0);
  return AlgorithmicOperator({a, b});
}

ProximityEvaluator make_guarantee_proximity() {
  auto a = std::make_shared<HalfSpace>(vec2(-1.0, -1.0), -1.0);
  auto b = std::make_shared<HalfSpace>(vec2(1.0, -1.0), 0.0);
  return ProximityEvaluator({{a, 0}, {b, 0}});
}

GuaranteePair demo_guarantee(const Vector& start, int iterations, double alpha,
                             double scale) {
  const AlgorithmicOperator op = make_guarantee_operator();
  const ProximityEvaluator prox = make_guarantee_proximity();
  RunConfig cfg;
  cfg.max_outer_iterations = iterations;
  cfg.trace = TraceMode::full;

  GuaranteePair out;
  out.start = start;
  out.basic = run_basic(op, start, prox, cfg);

  const PerturbationPlan plan =
      PerturbationPlan::single("phi", std::make_shared<SquaredNorm>(), 2);
  KernelSchedule schedule(alpha, scale);
  out.superiorized = run_superiorized(op, plan, schedule, start, prox, cfg);
  return out;
}

// ---------------------------------------------------------------------------
// Two balls

BallsConfig BallsConfig::defaults() {
  BallsConfig cfg;
  cfg.center_a = vec2(3.0, 0.0);
  cfg.center_b = vec2(0.0, 3.0);
  cfg.radius_a = 2.5;
  cfg.radius_b = 2.5;
  cfg.start = vec2(4.0, 4.0);
  return cfg;
}

BallsResult run_exp1_balls(const BallsConfig& cfg) {
  auto ball_a = std::make_shared<Ball>(cfg.center_a, cfg.radius_a);
  auto ball_b = std::make_shared<Ball>(cfg.center_b, cfg.radius_b);
  const AlgorithmicOperator op({ball_a, ball_b});
  const ProximityEvaluator prox({{ball_a, 0}, {ball_b, 0}});
  const PerturbationPlan plan = PerturbationPlan::single(
      "phi", std::make_shared<SquaredNorm>(/*half=*/true), cfg.start.size());

  RunConfig run_cfg;
  run_cfg.max_outer_iterations = cfg.iterations;
  run_cfg.perturbations_per_iteration = cfg.perturbations;
  run_cfg.trace = TraceMode::full;

  BallsResult out;
  auto add = [&](std::string label, IterationTrace trace) {
    LabeledRun run;
    run.label = std::move(label);
    run.final_norm = trace.final_iterate.norm();
    run.trace = std::move(trace);
    out.runs.push_back(std::move(run));
  };

  add("basic", run_basic(op, cfg.start, prox, run_cfg));
  {
    KernelSchedule sched(cfg.kernel_slow, 1.0);
    add("superiorized_slow",
        run_superiorized(op, plan, sched, cfg.start, prox, run_cfg));
  }
  {
    KernelSchedule sched(cfg.kernel_fast, 1.0);
    add("superiorized_fast",
        run_superiorized(op, plan, sched, cfg.start, prox, run_cfg));
  }
  {
    RestartSchedule sched(KernelSchedule(cfg.kernel_slow, 1.0), cfg.window);
    add("superiorized_restarts",
        run_superiorized(op, plan, sched, cfg.start, prox, run_cfg));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Monte Carlo over random half-space pairs

namespace {

struct McInstance {
  AlgorithmicOperator op;
  Vector start;
  long resamples = 0;
};

McInstance sample_mc_instance(Rng& rng) {
  McInstance inst;
  for (;;) {
    // Directions drawn uniformly on the circle by disk rejection; the two
    // sets share one offset in (-1, 0), which keeps the origin infeasible
    // and puts both boundary lines at the same distance from it.
    auto draw_normal = [&rng]() {
      Vector normal(2);
      double nsq;
      do {
        normal[0] = rng.uniform(-1.0, 1.0);
        normal[1] = rng.uniform(-1.0, 1.0);
        nsq = normal.squaredNorm();
      } while (nsq > 1.0 || nsq < 1e-12);
      normal /= std::sqrt(nsq);
      return normal;
    };
    Vector normal_a = draw_normal();
    Vector normal_b = draw_normal();
    const double offset = -rng.uniform_right_open(0.0, 1.0);
    auto a = std::make_shared<HalfSpace>(std::move(normal_a), offset);
    auto b = std::make_shared<HalfSpace>(std::move(normal_b), offset);

    bool found = false;
    Vector y0(2);
    for (int attempt = 0; attempt < 10000; ++attempt) {
      y0[0] = rng.uniform(-1.0, 1.0);
      y0[1] = rng.uniform(-1.0, 1.0);
      const bool in_a = a->normal().dot(y0) <= a->offset();
      const bool in_b = b->normal().dot(y0) <= b->offset();
      if (!(in_a && in_b)) {
        found = true;
        break;
      }
    }
    if (found) {
      inst.op = AlgorithmicOperator({std::move(a), std::move(b)});
      inst.start = y0;
      return inst;
    }
    ++inst.resamples;
  }
}

struct McRunOutcome {
  double ap = 0.0;
  std::vector<std::array<double, 2>> per_kernel;  // {sup, restarted}
  long resamples = 0;
};

McRunOutcome mc_single_run(std::uint64_t master_seed, long run_index,
                           const MonteCarloConfig& cfg) {
  Rng rng(Rng::derive_stream(master_seed, static_cast<std::uint64_t>(run_index)));
  McInstance inst = sample_mc_instance(rng);

  const ProximityEvaluator no_prox;
  RunConfig run_cfg;
  // Run to convergence; iterations is a safety cap for sliver-thin
  // intersections whose alternating projections contract very slowly.
  run_cfg.max_outer_iterations = cfg.iterations;
  run_cfg.stationary_tolerance = 1e-12;
  run_cfg.perturbations_per_iteration = cfg.perturbations;
  run_cfg.trace = TraceMode::final_only;

  const PerturbationPlan plan =
      PerturbationPlan::single("phi", std::make_shared<SquaredNorm>(), 2);

  McRunOutcome out;
  out.resamples = inst.resamples;
  out.ap = run_basic(inst.op, inst.start, no_prox, run_cfg).final_iterate.norm();
  out.per_kernel.reserve(cfg.kernels.size());
  for (const double alpha : cfg.kernels) {
    KernelSchedule plain(alpha, 1.0);
    const double sup =
        run_superiorized(inst.op, plan, plain, inst.start, no_prox, run_cfg)
            .final_iterate.norm();
    RestartSchedule restarted(KernelSchedule(alpha, 1.0), cfg.window);
    const double res =
        run_superiorized(inst.op, plan, restarted, inst.start, no_prox, run_cfg)
            .final_iterate.norm();
    out.per_kernel.push_back({sup, res});
  }
  return out;
}

}  // namespace

MonteCarloReport run_exp1_montecarlo(const MonteCarloConfig& cfg) {
  if (cfg.runs < 0) throw ConfigError("run count must be nonnegative");
  MonteCarloReport report;
  report.runs = cfg.runs;
  report.seed = cfg.seed;
  report.iterations = cfg.iterations;
  report.window = cfg.window;
  report.win_margin = cfg.win_margin;
  report.kernels.resize(cfg.kernels.size());
  for (std::size_t i = 0; i < cfg.kernels.size(); ++i) {
    report.kernels[i].kernel = cfg.kernels[i];
  }
  if (cfg.runs == 0) return report;

  const double margin = cfg.win_margin;
  auto tally_pair = [margin](PairTally& tally, double first, double second) {
    if (first < second - margin) {
      ++tally.first_wins;
    } else if (second < first - margin) {
      ++tally.second_wins;
    }
  };

  unsigned thread_count = cfg.threads > 0
                              ? static_cast<unsigned>(cfg.threads)
                              : std::max(1u, std::thread::hardware_concurrency());
  thread_count = std::min<unsigned>(
      thread_count, static_cast<unsigned>(std::max<long>(1, cfg.runs)));

  // Each worker tallies a contiguous chunk; counts are added afterwards, so
  // serial and parallel execution produce identical reports.
  std::vector<MonteCarloReport> partials(thread_count, report);
  std::vector<std::thread> workers;
  workers.reserve(thread_count);
  const long chunk = (cfg.runs + thread_count - 1) / thread_count;
  for (unsigned t = 0; t < thread_count; ++t) {
    const long begin = static_cast<long>(t) * chunk;
    const long end = std::min<long>(cfg.runs, begin + chunk);
    workers.emplace_back([&, begin, end, t]() {
      MonteCarloReport& local = partials[t];
      for (long run = begin; run < end; ++run) {
        const McRunOutcome outcome = mc_single_run(cfg.seed, run, cfg);
        local.resampled_instances += outcome.resamples;
        for (std::size_t ki = 0; ki < cfg.kernels.size(); ++ki) {
          const auto [sup, res] = outcome.per_kernel[ki];
          tally_pair(local.kernels[ki].ap_vs_sup, outcome.ap, sup);
          tally_pair(local.kernels[ki].ap_vs_res, outcome.ap, res);
          tally_pair(local.kernels[ki].sup_vs_res, sup, res);
        }
      }
    });
  }
  for (auto& w : workers) w.join();

  for (const MonteCarloReport& local : partials) {
    report.resampled_instances += local.resampled_instances;
    for (std::size_t ki = 0; ki < cfg.kernels.size(); ++ki) {
      auto& dst = report.kernels[ki];
      const auto& src = local.kernels[ki];
      dst.ap_vs_sup.first_wins += src.ap_vs_sup.first_wins;
      dst.ap_vs_sup.second_wins += src.ap_vs_sup.second_wins;
      dst.ap_vs_res.first_wins += src.ap_vs_res.first_wins;
      dst.ap_vs_res.second_wins += src.ap_vs_res.second_wins;
      dst.sup_vs_res.first_wins += src.sup_vs_res.first_wins;
      dst.sup_vs_res.second_wins += src.sup_vs_res.second_wins;
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Planar split minimization instance

SplitProblem make_exp2_problem(bool literal_x_direction) {
  Matrix rotation(2, 2);
  rotation << 0.0, -1.0, 1.0, 0.0;  // quarter turn counterclockwise

  std::vector<ConvexSetPtr> c_sets = {
      std::make_shared<HalfSpace>(vec2(1.0, 1.0), 10.0),
      std::make_shared<HalfSpace>(vec2(-13.0, 3.0), -26.0),
      std::make_shared<HalfSpace>(vec2(0.0, -1.0), -1.0),
  };
  // Q_j is the image of C_j under the rotation; for an orthogonal map the
  // image half-space keeps the offset and rotates the normal.
  std::vector<ConvexSetPtr> q_sets;
  q_sets.reserve(c_sets.size());
  for (const auto& c : c_sets) {
    const auto* h = static_cast<const HalfSpace*>(c.get());
    q_sets.push_back(
        std::make_shared<HalfSpace>(rotation * h->normal(), h->offset()));
  }

  SplitProblem prob{std::move(c_sets),
                    std::move(q_sets),
                    rotation,
                    BlockPartition({1, 1}),
                    nullptr,
                    {}};
  TargetPtr f = std::make_shared<LinearForm>(vec2(0.0, 1.0));  // f(x) = x2
  if (literal_x_direction) {
    f = std::make_shared<FixedDirectionTarget>(f, vec2(0.0, 1.0));
  }
  prob.x_target = f;
  prob.block_targets = {std::make_shared<LinearForm>(Vector::Constant(1, -1.0)),
                        std::make_shared<LinearForm>(Vector::Constant(1, -1.0))};
  prob.validate();
  return prob;
}

Exp2Config Exp2Config::defaults() {
  Exp2Config cfg;
  cfg.start = vec2(7.0, 4.0);
  return cfg;
}

Exp2Result run_exp2(const Exp2Config& cfg) {
  const SplitProblem prob = make_exp2_problem(cfg.literal_x_direction);
  const AlgorithmicOperator op = build_mssfp_operator(prob);

  RunConfig run_cfg;
  run_cfg.max_outer_iterations = cfg.iterations;
  run_cfg.perturbations_per_iteration = cfg.perturbations;
  run_cfg.trace = TraceMode::full;

  Exp2Result out;
  out.basic = run_smp_basic(prob, op, cfg.start, run_cfg);
  KernelSchedule schedule(cfg.alpha, cfg.scale);
  out.superiorized = run_smp_superiorized(prob, op, schedule, cfg.start, run_cfg);
  out.basic_x = out.basic.final_iterate.head(2);
  out.basic_y = out.basic.final_iterate.tail(2);
  out.sup_x = out.superiorized.final_iterate.head(2);
  out.sup_y = out.superiorized.final_iterate.tail(2);
  return out;
}

}  // namespace supr::experiments
