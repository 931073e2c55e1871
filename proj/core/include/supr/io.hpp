#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "supr/engines.hpp"
#include "supr/experiments.hpp"
#include "supr/schedules.hpp"

namespace supr::io {

// ---------------------------------------------------------------------------
// Dense matrices: a small binary format (magic, row/col counts, row-major
// doubles) plus CSV for interchange. load_matrix dispatches on extension.

void save_matrix_binary(const std::filesystem::path& path, const Matrix& m);
Matrix load_matrix_binary(const std::filesystem::path& path);
void save_matrix_csv(const std::filesystem::path& path, const Matrix& m);
Matrix load_matrix_csv(const std::filesystem::path& path);
Matrix load_matrix(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Declarative pieces (JSON): convex sets, targets, schedules, problems.

ConvexSetPtr set_from_json_string(const std::string& text);
std::string set_to_json_string(const ConvexSet& set);

TargetPtr target_from_json_string(const std::string& text);
std::string target_to_json_string(const Target& target);

struct ScheduleSpec {
  double alpha = 0.5;
  double scale = 1.0;
  std::uint64_t window = kNoRestart;  // kNoRestart encodes "none"
};

std::unique_ptr<StepSchedule> make_schedule(const ScheduleSpec& spec);
ScheduleSpec schedule_spec_from_json_string(const std::string& text);
std::string schedule_spec_to_json_string(const ScheduleSpec& spec);

/// Problem file: set families, the matrix (inline rows or a file reference
/// resolved relative to the problem file), the block partition and targets.
SplitProblem load_problem(const std::filesystem::path& path);
void save_problem(const std::filesystem::path& path, const SplitProblem& prob,
                  const std::string& matrix_file = "");

/// Full generic-run configuration: problem (inline or file reference),
/// algorithm name, schedule, run parameters, start point.
struct GenericRun {
  SplitProblem problem;
  std::string algorithm = "superiorized";
  ScheduleSpec schedule;
  RunConfig run;
  std::optional<Vector> start;  // x-space; default is the zero vector
};

GenericRun load_generic_run(const std::filesystem::path& config_path);

// ---------------------------------------------------------------------------
// Outputs.

void write_text(const std::filesystem::path& path, const std::string& text);

/// CSV trace: k, proximity, one column per target label, step, candidates,
/// restart, guard_events; full-mode traces append iterate and perturbed
/// point components.
void write_trace_csv(const std::filesystem::path& path,
                     const IterationTrace& trace);

void write_grid_csv(const std::filesystem::path& path, const Matrix& grid);
void write_grid_pgm(const std::filesystem::path& path, const Matrix& grid);

// Deterministic JSON renderings (no wall-clock content).
std::string to_json(const experiments::GuaranteePair& pair);
std::string to_json(const experiments::BallsResult& result);
std::string to_json(const experiments::MonteCarloReport& report);
std::string to_json(const experiments::Exp2Result& result);
std::string to_json(const experiments::ImrtRunReport& report);
std::string trace_summary_json(const IterationTrace& trace);

/// Table-1-style CSV: one row per kernel, two win-percentage columns per
/// method pairing.
std::string montecarlo_table_csv(const experiments::MonteCarloReport& report);

/// Wall-clock sidecar, kept out of report.json so reports stay byte-stable.
std::string timings_json(const std::vector<std::pair<std::string, double>>& entries);

// ---------------------------------------------------------------------------
// Dose-planning instances: instance.json plus a referenced matrix file.

void save_imrt_instance(const std::filesystem::path& dir,
                        const experiments::ImrtInstance& inst);
experiments::ImrtInstance load_imrt_instance(const std::filesystem::path& path);

}  // namespace supr::io
