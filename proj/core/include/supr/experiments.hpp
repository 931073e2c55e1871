#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "supr/engines.hpp"

namespace supr::experiments {

// ---------------------------------------------------------------------------
// Two half-spaces demo: min-norm point of {x1+x2 >= 1} and {x1-x2 <= 0},
// alternating projections against the squared-norm superiorized version.

AlgorithmicOperator make_guarantee_operator();
ProximityEvaluator make_guarantee_proximity();

struct GuaranteePair {
  Vector start;
  IterationTrace basic;
  IterationTrace superiorized;
};

GuaranteePair demo_guarantee(const Vector& start, int iterations = 50,
                             double alpha = 0.5, double scale = 1.0);

// ---------------------------------------------------------------------------
// Min-norm point in the intersection of two balls: alternating projections,
// two superiorized kernels and the restarted variant, fixed iteration count.

struct BallsConfig {
  Vector center_a, center_b;
  double radius_a = 0.0, radius_b = 0.0;
  Vector start;
  int iterations = 500;
  double kernel_slow = 0.6;
  double kernel_fast = 0.999;
  std::uint64_t window = 50;
  int perturbations = 1;

  static BallsConfig defaults();
};

struct LabeledRun {
  std::string label;
  IterationTrace trace;
  double final_norm = 0.0;
};

struct BallsResult {
  std::vector<LabeledRun> runs;  // basic, sup slow, sup fast, restarts
};

BallsResult run_exp1_balls(const BallsConfig& cfg);

// ---------------------------------------------------------------------------
// Randomized half-space pairs: percentage of runs in which each method of a
// pair reaches a final point of smaller norm than the other, with a margin.
// Instance draw order per run stream: normal of A (pairs of uniforms in
// [-1,1)^2 until nonzero, then normalized), offset of A in (-1,0), same for
// B, then start attempts uniform in [-1,1)^2 until infeasible for A or B.

struct MonteCarloConfig {
  long runs = 10000;
  std::vector<double> kernels{0.5, 0.9};
  std::uint64_t seed = 1;
  int iterations = 1000000;  // safety cap; runs stop on stationarity
  std::uint64_t window = 20;
  int perturbations = 1;
  double win_margin = 1e-3;
  int threads = 0;  // 0 = hardware concurrency
};

struct PairTally {
  long first_wins = 0;
  long second_wins = 0;
};

struct KernelComparison {
  double kernel = 0.0;
  PairTally ap_vs_sup;   // alternating projections vs superiorized
  PairTally ap_vs_res;   // alternating projections vs restarted
  PairTally sup_vs_res;  // superiorized vs restarted
};

struct MonteCarloReport {
  long runs = 0;
  std::uint64_t seed = 0;
  int iterations = 0;
  std::uint64_t window = 0;
  double win_margin = 0.0;
  std::vector<KernelComparison> kernels;
  long resampled_instances = 0;
};

MonteCarloReport run_exp1_montecarlo(const MonteCarloConfig& cfg);

// ---------------------------------------------------------------------------
// Planar split minimization instance: C is a triangle cut out by three
// half-spaces, A is the quarter-turn rotation, Q its image, f lowers x2 and
// the two one-dimensional y-blocks are raised. The literal_x_direction
// switch forces the x-perturbation direction (0, +1) instead of the descent
// direction (0, -1) for f(x) = x2.

struct Exp2Config {
  Vector start;
  int iterations = 50;
  double alpha = 0.9;
  double scale = 1.0;
  int perturbations = 1;
  bool literal_x_direction = false;

  static Exp2Config defaults();
};

struct Exp2Result {
  IterationTrace basic;
  IterationTrace superiorized;
  Vector basic_x, basic_y, sup_x, sup_y;
};

SplitProblem make_exp2_problem(bool literal_x_direction = false);
Exp2Result run_exp2(const Exp2Config& cfg);

// ---------------------------------------------------------------------------
// Dose planning study: a side x side pixel cross-section with L random-walk
// tumor structures, a dense nonnegative matrix V, the dose matrix as its
// generalized left inverse, and certified-feasible reference intensities.

struct ImrtPhantomSpec {
  Index side = 20;
  Index beamlets = 460;
  Index tumors = 2;
  Index tumor_pixels = 32;

  static ImrtPhantomSpec desk();
  static ImrtPhantomSpec paper();
};

struct ImrtInstance {
  Index side = 0;
  Index beamlets = 0;
  std::vector<std::vector<Index>> tumors;  // pixel ids per structure, ascending
  std::vector<Index> y_to_pixel;           // y coordinate -> pixel id
  Matrix dose;                             // m x n, rows in y order
  Vector x_ref;                            // feasible intensities
  Vector y_ref;                            // dose of x_ref, y order
  double organ_lower = 0.0, organ_upper = 0.0;
  std::vector<double> tumor_lower, tumor_upper;
  double intensity_lower = 0.0, intensity_upper = 0.0;
  std::vector<double> epsilons;
  std::uint64_t seed = 0;

  Index pixels() const { return side * side; }
  std::vector<Index> pixel_to_y() const;
};

/// Draw order per attempt: tumor blobs, reference doses per pixel id, V
/// row-major, then the bound slacks. Ill-conditioned draws are retried with
/// a derived seed, at most five times.
ImrtInstance gen_imrt_instance(std::uint64_t seed, const ImrtPhantomSpec& spec);

/// Blocks ordered tumor 1..L then the organ remainder; tumor blocks carry
/// masked-grid TV targets, the organ block and the x-space a zero target.
SplitProblem make_imrt_problem(const ImrtInstance& inst);

/// side x side array of the dose vector in pixel layout.
Matrix dose_grid(const ImrtInstance& inst, const Vector& y);

enum class ImrtAlgorithm { basic, superiorized, superiorized_restarts };

std::string to_string(ImrtAlgorithm algo);

struct ImrtAlgoParams {
  double alpha = 0.999;
  double scale = 100000.0;
  std::uint64_t window = kNoRestart;
  int perturbations = 5;
};

/// Published step parameters, tuned for the full problem size.
ImrtAlgoParams imrt_paper_params(ImrtAlgorithm algo);

/// Desk-scale step parameters: the plain superiorized kernel is shortened
/// so its perturbations fade partway through the run, which is the regime
/// the full-size parameters produce on the large problem.
ImrtAlgoParams imrt_desk_params(ImrtAlgorithm algo);

struct ImrtRunResult {
  ImrtAlgorithm algorithm = ImrtAlgorithm::basic;
  ImrtAlgoParams params;
  std::vector<double> tumor_tv;
  long iterations = 0;
  StopReason reason = StopReason::max_iterations;
  double wall_seconds = 0.0;
  IterationTrace trace;
  Vector final_x, final_y;
};

struct ImrtRunReport {
  std::uint64_t instance_seed = 0;
  std::uint64_t start_seed = 0;
  double proximity_threshold = 0.01;
  std::vector<ImrtRunResult> runs;
  bool all_converged = false;
};

/// Runs the requested algorithms from one shared random start in the
/// intensity box. base_cfg supplies the stop rule and trace mode; params
/// picks the step parameters per algorithm (desk defaults when null).
using ImrtParamChooser = ImrtAlgoParams (*)(ImrtAlgorithm);

ImrtRunReport run_exp3(const ImrtInstance& inst,
                       const std::vector<ImrtAlgorithm>& algos,
                       std::uint64_t start_seed, const RunConfig& base_cfg,
                       ImrtParamChooser params = nullptr);

}  // namespace supr::experiments
