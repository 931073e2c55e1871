#include "supr/engines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <utility>

namespace supr {

PerturbationPlan::PerturbationPlan(std::vector<PlanEntry> entries, Index dim)
    : entries_(std::move(entries)), dim_(dim) {
  std::sort(entries_.begin(), entries_.end(),
            [](const PlanEntry& a, const PlanEntry& b) {
              return a.offset < b.offset;
            });
  Index last_end = 0;
  for (const PlanEntry& e : entries_) {
    if (!e.target) throw ConfigError("plan entry without target");
    if (e.size <= 0 || e.offset < 0 || e.offset + e.size > dim_) {
      throw ConfigError("plan entry range out of bounds");
    }
    if (e.offset < last_end) {
      throw ConfigError("plan entries must not overlap");
    }
    if (e.target->dim() >= 0 && e.target->dim() != e.size) {
      throw ConfigError("plan entry '" + e.label + "' target dimension mismatch");
    }
    last_end = e.offset + e.size;
  }
}

PerturbationPlan PerturbationPlan::single(std::string label, TargetPtr target,
                                          Index dim) {
  return PerturbationPlan({{std::move(label), std::move(target), 0, dim}}, dim);
}

PerturbationPlan PerturbationPlan::for_problem(const SplitProblem& prob) {
  prob.validate();
  std::vector<PlanEntry> entries;
  entries.reserve(1 + static_cast<std::size_t>(prob.blocks.count()));
  entries.push_back({"f", prob.x_target, 0, prob.n()});
  for (Index b = 0; b < prob.blocks.count(); ++b) {
    entries.push_back({"phi" + std::to_string(b + 1),
                       prob.block_targets[static_cast<std::size_t>(b)],
                       prob.n() + prob.blocks.offset(b), prob.blocks.size(b)});
  }
  return PerturbationPlan(std::move(entries), prob.n() + prob.m());
}

std::vector<std::string> PerturbationPlan::labels() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.label);
  return out;
}

std::vector<double> PerturbationPlan::values(const Vector& z) const {
  std::vector<double> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) {
    out.push_back(e.target->value(z.segment(e.offset, e.size)));
  }
  return out;
}

namespace {

struct InnerWorkspace {
  Vector dir;
  std::vector<Vector> candidate;
  std::vector<double> start_values;  // values at y^k
  std::vector<double> trial_values;

  void init(const PerturbationPlan& plan, Index dim) {
    dir = Vector::Zero(dim);
    candidate.clear();
    for (const auto& e : plan.entries()) candidate.emplace_back(e.size);
    start_values.resize(plan.entries().size());
    trial_values.resize(plan.entries().size());
  }
};

InnerLoopResult inner_loop(const PerturbationPlan& plan, StepSchedule& schedule,
                           int perturbations, int guard_limit, Vector& z,
                           InnerWorkspace& ws, bool check_invariants) {
  const auto& entries = plan.entries();
  InnerLoopResult result;
  for (std::size_t e = 0; e < entries.size(); ++e) {
    ws.start_values[e] =
        entries[e].target->value(z.segment(entries[e].offset, entries[e].size));
  }
  for (int j = 0; j < perturbations; ++j) {
    for (std::size_t e = 0; e < entries.size(); ++e) {
      entries[e].target->direction_into(
          z.segment(entries[e].offset, entries[e].size),
          ws.dir.segment(entries[e].offset, entries[e].size));
    }
    int rejects = 0;
    for (;;) {
      const double eta = schedule.next_candidate();
      ++result.candidates;
      bool accepted = true;
      for (std::size_t e = 0; e < entries.size(); ++e) {
        const auto seg = z.segment(entries[e].offset, entries[e].size);
        ws.candidate[e] =
            seg + eta * ws.dir.segment(entries[e].offset, entries[e].size);
        ws.trial_values[e] = entries[e].target->value(ws.candidate[e]);
        // Strict comparison: ties with the outer-start value are accepted.
        if (ws.trial_values[e] > ws.start_values[e]) {
          accepted = false;
          break;
        }
      }
      if (accepted) {
        for (std::size_t e = 0; e < entries.size(); ++e) {
          z.segment(entries[e].offset, entries[e].size) = ws.candidate[e];
          if (check_invariants && ws.trial_values[e] > ws.start_values[e]) {
            throw std::logic_error("perturbation raised a target value");
          }
        }
        result.step_sum += eta;
        break;
      }
      if (++rejects >= guard_limit) {
        // Exact arithmetic guarantees the walk terminates; near a minimizer
        // floating point can stall, so fall back to a zero step.
        ++result.guard_events;
        break;
      }
    }
  }
  return result;
}

IterationTrace run_engine(const AlgorithmicOperator& op,
                          const PerturbationPlan* plan, StepSchedule* schedule,
                          const Vector& start, const ProximityEvaluator& prox,
                          const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  if (cfg.perturbations_per_iteration < 1) {
    throw ConfigError("N must be a positive integer");
  }
  if (cfg.guard_limit < 1) throw ConfigError("guard limit must be >= 1");
  if (cfg.max_outer_iterations < 0) {
    throw ConfigError("iteration cap must be nonnegative");
  }
  if (!start.allFinite()) throw DivergenceError("start point is not finite");
  if (!op.empty() && op.dim() != start.size()) {
    throw std::invalid_argument("operator/start dimension mismatch");
  }
  if (plan && plan->dim() != start.size()) {
    throw std::invalid_argument("plan/start dimension mismatch");
  }

  IterationTrace trace;
  if (plan) trace.target_labels = plan->labels();
  const bool want_rows = cfg.trace != TraceMode::final_only;
  const bool want_snapshots = cfg.trace == TraceMode::full;
  const bool prox_stop = cfg.proximity_threshold.has_value();

  Vector z = start;
  InnerWorkspace ws;
  if (plan) ws.init(*plan, z.size());

  if (want_rows) {
    IterationRecord row;
    row.k = 0;
    row.proximity = prox(z);
    if (plan) row.targets = plan->values(z);
    trace.records.push_back(std::move(row));
    if (want_snapshots) {
      trace.iterates.push_back(z);
      trace.perturbed.push_back(z);
    }
  }

  StopReason reason = StopReason::max_iterations;
  long performed = 0;
  Vector previous;
  int still_count = 0;
  if (cfg.stationary_tolerance) previous = z;
  for (long k = 1; k <= cfg.max_outer_iterations; ++k) {
    performed = k;
    InnerLoopResult inner;
    if (plan && schedule) {
      inner = inner_loop(*plan, *schedule, cfg.perturbations_per_iteration,
                         cfg.guard_limit, z, ws, cfg.check_invariants);
      trace.accepted_step_total += inner.step_sum;
      trace.candidates_total += inner.candidates;
      if (inner.guard_events > 0) {
        trace.guard_events_total += inner.guard_events;
        if (trace.warnings.size() < 16) {
          trace.warnings.push_back("guard limit reached at outer iteration " +
                                   std::to_string(k) + "; zero step taken");
        }
      }
    }
    if (want_snapshots) trace.perturbed.push_back(z);

    bool restarted = false;
    if (schedule) restarted = schedule->complete_outer_iteration();
    if (restarted) ++trace.restarts;

    op.apply_in_place(z);
    if (!z.allFinite()) {
      throw DivergenceError("iterate became non-finite at outer iteration " +
                            std::to_string(k));
    }

    double p = std::numeric_limits<double>::quiet_NaN();
    if (want_rows || prox_stop) p = prox(z);
    if (want_rows) {
      IterationRecord row;
      row.k = k;
      row.proximity = p;
      if (plan) row.targets = plan->values(z);
      row.step_sum = inner.step_sum;
      row.candidates = inner.candidates;
      row.restart = restarted;
      row.guard_events = inner.guard_events;
      trace.records.push_back(std::move(row));
      if (want_snapshots) trace.iterates.push_back(z);
    }
    if (prox_stop && p < *cfg.proximity_threshold) {
      reason = StopReason::proximity;
      break;
    }
    if (cfg.stationary_tolerance) {
      const double moved = (z - previous).norm();
      still_count =
          moved <= *cfg.stationary_tolerance * (1.0 + z.norm()) ? still_count + 1
                                                                : 0;
      previous = z;
      if (still_count >= 3) {
        reason = StopReason::stationary;
        break;
      }
    }
  }

  trace.final_iterate = std::move(z);
  trace.iterations = performed;
  trace.reason = reason;
  trace.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return trace;
}

}  // namespace

InnerLoopResult perturb_inner_loop(const PerturbationPlan& plan,
                                   StepSchedule& schedule, int perturbations,
                                   int guard_limit, Vector& z) {
  if (plan.dim() != z.size()) {
    throw std::invalid_argument("plan/vector dimension mismatch");
  }
  InnerWorkspace ws;
  ws.init(plan, z.size());
  return inner_loop(plan, schedule, perturbations, guard_limit, z, ws, true);
}

IterationTrace run_basic(const AlgorithmicOperator& op, const Vector& start,
                         const ProximityEvaluator& prox, const RunConfig& cfg) {
  return run_engine(op, nullptr, nullptr, start, prox, cfg);
}

IterationTrace run_superiorized(const AlgorithmicOperator& op,
                                const PerturbationPlan& plan,
                                StepSchedule& schedule, const Vector& start,
                                const ProximityEvaluator& prox,
                                const RunConfig& cfg) {
  return run_engine(op, &plan, &schedule, start, prox, cfg);
}

IterationTrace run_smp_basic(const SplitProblem& prob,
                             const AlgorithmicOperator& op, const Vector& x0,
                             const RunConfig& cfg) {
  if (x0.size() != prob.n()) {
    throw std::invalid_argument("x0 must live in the x-space R^n");
  }
  Vector z0(prob.n() + prob.m());
  z0.head(prob.n()) = x0;
  z0.tail(prob.m()) = prob.a * x0;
  return run_engine(op, nullptr, nullptr, z0, make_smp_proximity(prob), cfg);
}

IterationTrace run_smp_superiorized(const SplitProblem& prob,
                                    const AlgorithmicOperator& op,
                                    StepSchedule& schedule, const Vector& x0,
                                    const RunConfig& cfg) {
  if (x0.size() != prob.n()) {
    throw std::invalid_argument("x0 must live in the x-space R^n");
  }
  Vector z0(prob.n() + prob.m());
  z0.head(prob.n()) = x0;
  z0.tail(prob.m()) = prob.a * x0;
  const PerturbationPlan plan = PerturbationPlan::for_problem(prob);
  return run_engine(op, &plan, &schedule, z0, make_smp_proximity(prob), cfg);
}

}  // namespace supr
