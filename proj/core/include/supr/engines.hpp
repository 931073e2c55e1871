#pragma once

#include <optional>
#include <string>
#include <vector>

#include "supr/common.hpp"
#include "supr/convex_sets.hpp"
#include "supr/schedules.hpp"
#include "supr/split_problems.hpp"
#include "supr/targets.hpp"

namespace supr {

enum class TraceMode {
  full,       // per-iteration rows plus iterate and perturbed-point snapshots
  summary,    // per-iteration rows only
  final_only  // no rows; final iterate and aggregates only
};

enum class StopReason { proximity, stationary, max_iterations };

struct RunConfig {
  int perturbations_per_iteration = 1;  // N
  long max_outer_iterations = 100000;
  std::optional<double> proximity_threshold;  // stop when prox < threshold
  /// Optional run-to-convergence rule: stop once the outer iterate moves by
  /// less than tol * (1 + ||y||) for three consecutive iterations.
  std::optional<double> stationary_tolerance;
  int guard_limit = 200;  // rejected candidates before a zero step is taken
  TraceMode trace = TraceMode::summary;
  bool check_invariants = true;
};

/// Targets attached to coordinate ranges of the iterate. A single entry over
/// the whole space gives the plain superiorized iteration; an x-space entry
/// plus one entry per y-subvector gives the joint subvector scheme, where a
/// candidate step is rejected if any entry's value would exceed its value at
/// the start of the outer iteration.
struct PlanEntry {
  std::string label;
  TargetPtr target;
  Index offset = 0;
  Index size = 0;
};

class PerturbationPlan {
 public:
  PerturbationPlan() = default;
  PerturbationPlan(std::vector<PlanEntry> entries, Index dim);

  static PerturbationPlan single(std::string label, TargetPtr target, Index dim);
  /// f on the x-segment plus phi_b on every block segment.
  static PerturbationPlan for_problem(const SplitProblem& prob);

  const std::vector<PlanEntry>& entries() const { return entries_; }
  Index dim() const { return dim_; }
  bool empty() const { return entries_.empty(); }
  std::vector<std::string> labels() const;
  std::vector<double> values(const Vector& z) const;

 private:
  std::vector<PlanEntry> entries_;
  Index dim_ = 0;
};

struct IterationRecord {
  long k = 0;
  double proximity = 0.0;
  std::vector<double> targets;  // per plan entry, at the post-operator iterate
  double step_sum = 0.0;        // accepted step sizes of this outer iteration
  long candidates = 0;          // schedule candidates consumed (incl. rejected)
  bool restart = false;
  int guard_events = 0;
};

struct IterationTrace {
  std::vector<std::string> target_labels;
  std::vector<IterationRecord> records;  // leading k = 0 row for the start
  std::vector<Vector> iterates;          // full mode: y^k
  std::vector<Vector> perturbed;         // full mode: y^{k,N} (pre-operator)
  Vector final_iterate;
  long iterations = 0;
  StopReason reason = StopReason::max_iterations;
  double wall_seconds = 0.0;
  double accepted_step_total = 0.0;
  long candidates_total = 0;
  long restarts = 0;
  long guard_events_total = 0;
  std::vector<std::string> warnings;
};

struct InnerLoopResult {
  long candidates = 0;
  double step_sum = 0.0;
  int guard_events = 0;
};

/// One outer iteration's perturbation stage: performs N rounds of
/// "pick a nonascending direction, walk the candidate steps until no entry
/// exceeds its value at the start of the outer iteration, then step".
/// z is y^k on entry and y^{k,N} on exit. A round that exhausts guard_limit
/// consecutive rejections takes a zero step.
InnerLoopResult perturb_inner_loop(const PerturbationPlan& plan,
                                   StepSchedule& schedule, int perturbations,
                                   int guard_limit, Vector& z);

/// x^{k+1} = T(x^k) until the stop rule fires.
IterationTrace run_basic(const AlgorithmicOperator& op, const Vector& start,
                         const ProximityEvaluator& prox, const RunConfig& cfg);

/// The perturbed iteration y^{k+1} = T(y^{k,N}); with a RestartSchedule the
/// window bookkeeping runs once per outer iteration, after the perturbations
/// and before the operator.
IterationTrace run_superiorized(const AlgorithmicOperator& op,
                                const PerturbationPlan& plan,
                                StepSchedule& schedule, const Vector& start,
                                const ProximityEvaluator& prox,
                                const RunConfig& cfg);

/// Product-space runs from x0 with y0 = A x0.
IterationTrace run_smp_basic(const SplitProblem& prob,
                             const AlgorithmicOperator& op, const Vector& x0,
                             const RunConfig& cfg);
IterationTrace run_smp_superiorized(const SplitProblem& prob,
                                    const AlgorithmicOperator& op,
                                    StepSchedule& schedule, const Vector& x0,
                                    const RunConfig& cfg);

}  // namespace supr
