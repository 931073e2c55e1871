#include "supr/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

namespace supr::io {

using nlohmann::json;

namespace {

constexpr char kMatrixMagic[8] = {'S', 'U', 'P', 'R', 'M', 'A', 'T', '1'};

[[noreturn]] void fail(const std::string& what) { throw ConfigError(what); }

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json vector_to_json(const Vector& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Vector vector_from_json(const json& arr, const char* what) {
  if (!arr.is_array()) fail(std::string(what) + " must be an array of numbers");
  Vector v(static_cast<Index>(arr.size()));
  Index i = 0;
  for (const auto& x : arr) {
    if (!x.is_number()) fail(std::string(what) + " must contain numbers only");
    v[i++] = x.get<double>();
  }
  return v;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& rows) {
  if (!rows.is_array() || rows.empty()) fail("matrix must be a nonempty array");
  const Index r = static_cast<Index>(rows.size());
  const Index c = static_cast<Index>(rows[0].size());
  Matrix m(r, c);
  for (Index i = 0; i < r; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != c) {
      fail("matrix rows must all have the same length");
    }
    for (Index j = 0; j < c; ++j) {
      m(i, j) = row[static_cast<std::size_t>(j)].get<double>();
    }
  }
  return m;
}

// Box bounds serialize unbounded entries as null.
json bound_to_json(double v, bool lower) {
  if (std::isinf(v) && ((lower && v < 0) || (!lower && v > 0))) return nullptr;
  return v;
}

double bound_from_json(const json& v, bool lower) {
  if (v.is_null()) {
    return lower ? -std::numeric_limits<double>::infinity()
                 : std::numeric_limits<double>::infinity();
  }
  if (!v.is_number()) fail("box bounds must be numbers or null");
  return v.get<double>();
}

json set_to_json(const ConvexSet& set) {
  if (const auto* h = dynamic_cast<const HalfSpace*>(&set)) {
    return json{{"kind", "halfspace"},
                {"normal", vector_to_json(h->normal())},
                {"offset", h->offset()}};
  }
  if (const auto* b = dynamic_cast<const Box*>(&set)) {
    json lower = json::array(), upper = json::array();
    for (Index i = 0; i < b->dim(); ++i) {
      lower.push_back(bound_to_json(b->lower()[i], true));
      upper.push_back(bound_to_json(b->upper()[i], false));
    }
    return json{{"kind", "box"}, {"lower", lower}, {"upper", upper}};
  }
  if (const auto* ball = dynamic_cast<const Ball*>(&set)) {
    return json{{"kind", "ball"},
                {"center", vector_to_json(ball->center())},
                {"radius", ball->radius()}};
  }
  if (const auto* s = dynamic_cast<const LabeledIntervalSet*>(&set)) {
    json intervals = json::object();
    for (const auto& [label, iv] : s->intervals()) {
      intervals[std::to_string(label)] = json::array({iv.first, iv.second});
    }
    return json{{"kind", "labeled_intervals"},
                {"labels", s->labels()},
                {"intervals", intervals}};
  }
  if (const auto* f = dynamic_cast<const FullSpace*>(&set)) {
    return json{{"kind", "full"}, {"dim", f->dim()}};
  }
  fail("this set kind has no file representation");
}

ConvexSetPtr set_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind")) fail("set requires a \"kind\"");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "halfspace") {
    return std::make_shared<HalfSpace>(
        vector_from_json(j.at("normal"), "halfspace normal"),
        j.at("offset").get<double>());
  }
  if (kind == "box") {
    const auto& lo = j.at("lower");
    const auto& hi = j.at("upper");
    if (!lo.is_array() || !hi.is_array() || lo.size() != hi.size()) {
      fail("box requires matching lower/upper arrays");
    }
    Vector lower(static_cast<Index>(lo.size())), upper(static_cast<Index>(hi.size()));
    for (std::size_t i = 0; i < lo.size(); ++i) {
      lower[static_cast<Index>(i)] = bound_from_json(lo[i], true);
      upper[static_cast<Index>(i)] = bound_from_json(hi[i], false);
    }
    return std::make_shared<Box>(std::move(lower), std::move(upper));
  }
  if (kind == "ball") {
    return std::make_shared<Ball>(vector_from_json(j.at("center"), "ball center"),
                                  j.at("radius").get<double>());
  }
  if (kind == "labeled_intervals") {
    std::vector<int> labels = j.at("labels").get<std::vector<int>>();
    std::map<int, std::pair<double, double>> intervals;
    for (const auto& [key, iv] : j.at("intervals").items()) {
      if (!iv.is_array() || iv.size() != 2) {
        fail("intervals must map labels to [lo, hi] pairs");
      }
      intervals[std::stoi(key)] = {iv[0].get<double>(), iv[1].get<double>()};
    }
    return std::make_shared<LabeledIntervalSet>(std::move(labels),
                                                std::move(intervals));
  }
  if (kind == "full") {
    return std::make_shared<FullSpace>(j.at("dim").get<Index>());
  }
  fail("unknown set kind \"" + kind + "\"");
}

json target_to_json(const Target& target) {
  if (dynamic_cast<const ZeroTarget*>(&target)) return json{{"kind", "zero"}};
  if (const auto* s = dynamic_cast<const SquaredNorm*>(&target)) {
    Vector probe = Vector::Constant(1, 2.0);
    return json{{"kind", "squared_norm"}, {"half", s->value(probe) == 2.0}};
  }
  if (const auto* l = dynamic_cast<const LinearForm*>(&target)) {
    return json{{"kind", "linear"},
                {"coefficients", vector_to_json(l->coefficients())}};
  }
  if (const auto* tv = dynamic_cast<const TvGrid*>(&target)) {
    if (tv->rows() == tv->cols() &&
        static_cast<Index>(tv->cells().size()) == tv->rows() * tv->cols()) {
      return json{{"kind", "tv_grid"}, {"side", tv->rows()}};
    }
    return json{{"kind", "tv_grid"},
                {"rows", tv->rows()},
                {"cols", tv->cols()},
                {"cells", tv->cells()}};
  }
  if (const auto* f = dynamic_cast<const FixedDirectionTarget*>(&target)) {
    return json{{"kind", "fixed_direction"},
                {"base", target_to_json(*f->base())},
                {"direction", vector_to_json(f->fixed_direction())}};
  }
  fail("this target kind has no file representation");
}

TargetPtr target_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind")) fail("target requires a \"kind\"");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "zero") return std::make_shared<ZeroTarget>();
  if (kind == "squared_norm") {
    return std::make_shared<SquaredNorm>(j.value("half", false));
  }
  if (kind == "linear") {
    return std::make_shared<LinearForm>(
        vector_from_json(j.at("coefficients"), "linear coefficients"));
  }
  if (kind == "negated_coordinate") {
    return negated_coordinate(j.at("dim").get<Index>(),
                              j.at("index").get<Index>());
  }
  if (kind == "tv_grid") {
    if (j.contains("side")) {
      return std::make_shared<TvGrid>(j.at("side").get<Index>());
    }
    return std::make_shared<TvGrid>(j.at("rows").get<Index>(),
                                    j.at("cols").get<Index>(),
                                    j.at("cells").get<std::vector<Index>>());
  }
  if (kind == "fixed_direction") {
    return std::make_shared<FixedDirectionTarget>(
        target_from_json(j.at("base")),
        vector_from_json(j.at("direction"), "fixed direction"));
  }
  fail("unknown target kind \"" + kind + "\"");
}

json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail("cannot parse " + path.string() + ": " + e.what());
  }
  return j;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json schedule_spec_to_json(const ScheduleSpec& spec) {
  json j{{"alpha", spec.alpha}, {"c", spec.scale}};
  if (spec.window == kNoRestart) {
    j["window"] = "none";
  } else {
    j["window"] = spec.window;
  }
  return j;
}

ScheduleSpec schedule_spec_from_json(const json& j) {
  ScheduleSpec spec;
  spec.alpha = j.at("alpha").get<double>();
  spec.scale = j.value("c", 1.0);
  if (j.contains("window")) {
    const auto& w = j.at("window");
    if (w.is_string()) {
      if (w.get<std::string>() != "none") fail("window must be an integer or \"none\"");
      spec.window = kNoRestart;
    } else if (w.is_number_unsigned() || w.is_number_integer()) {
      const long long value = w.get<long long>();
      if (value <= 0) fail("window must be a positive integer");
      spec.window = static_cast<std::uint64_t>(value);
    } else {
      fail("window must be an integer or \"none\"");
    }
  }
  return spec;
}

SplitProblem problem_from_json(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) fail("problem must be an object");
  Matrix a;
  const auto& mj = j.at("matrix");
  if (mj.is_array()) {
    a = matrix_from_json(mj);
  } else if (mj.is_object() && mj.contains("file")) {
    a = load_matrix(base_dir / mj.at("file").get<std::string>());
  } else {
    fail("matrix must be inline rows or {\"file\": path}");
  }

  std::vector<ConvexSetPtr> c_sets, q_sets;
  for (const auto& s : j.at("c_sets")) c_sets.push_back(set_from_json(s));
  for (const auto& s : j.at("q_sets")) q_sets.push_back(set_from_json(s));

  std::vector<Index> partition;
  if (j.contains("partition")) {
    partition = j.at("partition").get<std::vector<Index>>();
  } else {
    partition = {a.rows()};  // single block by default
  }

  TargetPtr x_target = j.contains("x_target")
                           ? target_from_json(j.at("x_target"))
                           : std::make_shared<ZeroTarget>();
  std::vector<TargetPtr> block_targets;
  if (j.contains("block_targets")) {
    for (const auto& t : j.at("block_targets")) {
      block_targets.push_back(target_from_json(t));
    }
  } else {
    for (std::size_t b = 0; b < partition.size(); ++b) {
      block_targets.push_back(std::make_shared<ZeroTarget>());
    }
  }

  SplitProblem prob{std::move(c_sets), std::move(q_sets),     std::move(a),
                    BlockPartition(partition), std::move(x_target),
                    std::move(block_targets)};
  prob.validate();
  return prob;
}

json stop_reason_json(StopReason reason) {
  switch (reason) {
    case StopReason::proximity:
      return "proximity";
    case StopReason::stationary:
      return "stationary";
    case StopReason::max_iterations:
      return "max_iterations";
  }
  return "unknown";
}

json trace_to_json(const IterationTrace& trace) {
  json j;
  j["iterations"] = trace.iterations;
  j["termination"] = stop_reason_json(trace.reason);
  j["accepted_step_total"] = trace.accepted_step_total;
  j["candidates_total"] = trace.candidates_total;
  j["restarts"] = trace.restarts;
  j["guard_events"] = trace.guard_events_total;
  if (!trace.records.empty()) {
    const auto& last = trace.records.back();
    j["final_proximity"] = last.proximity;
    if (!last.targets.empty()) {
      json targets = json::object();
      for (std::size_t i = 0; i < last.targets.size(); ++i) {
        targets[trace.target_labels[i]] = last.targets[i];
      }
      j["final_targets"] = targets;
    }
  }
  if (trace.final_iterate.size() <= 64) {
    j["final"] = vector_to_json(trace.final_iterate);
  } else {
    j["final_norm"] = trace.final_iterate.norm();
  }
  if (!trace.warnings.empty()) j["warnings"] = trace.warnings;
  return j;
}

}  // namespace

// ---------------------------------------------------------------------------
// Matrices

void save_matrix_binary(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot write " + path.string());
  out.write(kMatrixMagic, sizeof kMatrixMagic);
  const std::int64_t dims[2] = {m.rows(), m.cols()};
  out.write(reinterpret_cast<const char*>(dims), sizeof dims);
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      const double v = m(r, c);
      out.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
  }
  if (!out) fail("failed while writing " + path.string());
}

Matrix load_matrix_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open " + path.string());
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMatrixMagic, sizeof magic) != 0) {
    fail(path.string() + " is not a matrix file");
  }
  std::int64_t dims[2];
  in.read(reinterpret_cast<char*>(dims), sizeof dims);
  if (!in || dims[0] <= 0 || dims[1] <= 0) fail("bad matrix header");
  Matrix m(dims[0], dims[1]);
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      double v;
      in.read(reinterpret_cast<char*>(&v), sizeof v);
      m(r, c) = v;
    }
  }
  if (!in) fail("matrix file truncated: " + path.string());
  return m;
}

void save_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
  std::string text;
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      if (c) text += ',';
      text += format_double(m(r, c));
    }
    text += '\n';
  }
  write_text(path, text);
}

Matrix load_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && row.size() != rows.front().size()) {
      fail("ragged CSV matrix in " + path.string());
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail("empty CSV matrix in " + path.string());
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows[0].size()));
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    }
  }
  return m;
}

Matrix load_matrix(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".csv") return load_matrix_csv(path);
  return load_matrix_binary(path);
}

// ---------------------------------------------------------------------------
// Declarative pieces

ConvexSetPtr set_from_json_string(const std::string& text) {
  return set_from_json(json::parse(text));
}

std::string set_to_json_string(const ConvexSet& set) {
  return dump(set_to_json(set));
}

TargetPtr target_from_json_string(const std::string& text) {
  return target_from_json(json::parse(text));
}

std::string target_to_json_string(const Target& target) {
  return dump(target_to_json(target));
}

std::unique_ptr<StepSchedule> make_schedule(const ScheduleSpec& spec) {
  KernelSchedule kernel(spec.alpha, spec.scale);
  if (spec.window == kNoRestart) {
    return std::make_unique<KernelSchedule>(kernel);
  }
  return std::make_unique<RestartSchedule>(kernel, spec.window);
}

ScheduleSpec schedule_spec_from_json_string(const std::string& text) {
  return schedule_spec_from_json(json::parse(text));
}

std::string schedule_spec_to_json_string(const ScheduleSpec& spec) {
  return dump(schedule_spec_to_json(spec));
}

SplitProblem load_problem(const std::filesystem::path& path) {
  return problem_from_json(load_json_file(path), path.parent_path());
}

void save_problem(const std::filesystem::path& path, const SplitProblem& prob,
                  const std::string& matrix_file) {
  prob.validate();
  json j;
  if (matrix_file.empty()) {
    j["matrix"] = matrix_to_json(prob.a);
  } else {
    save_matrix_binary(path.parent_path() / matrix_file, prob.a);
    j["matrix"] = json{{"file", matrix_file}};
  }
  json c = json::array(), q = json::array();
  for (const auto& s : prob.c_sets) c.push_back(set_to_json(*s));
  for (const auto& s : prob.q_sets) q.push_back(set_to_json(*s));
  j["c_sets"] = std::move(c);
  j["q_sets"] = std::move(q);
  j["partition"] = prob.blocks.sizes();
  j["x_target"] = target_to_json(*prob.x_target);
  json bt = json::array();
  for (const auto& t : prob.block_targets) bt.push_back(target_to_json(*t));
  j["block_targets"] = std::move(bt);
  write_text(path, dump(j));
}

GenericRun load_generic_run(const std::filesystem::path& config_path) {
  const json j = load_json_file(config_path);
  const auto base_dir = config_path.parent_path();

  GenericRun out;
  if (!j.contains("problem")) fail("run config requires a \"problem\"");
  const auto& pj = j.at("problem");
  if (pj.is_string()) {
    out.problem = load_problem(base_dir / pj.get<std::string>());
  } else if (pj.is_object() && pj.contains("file")) {
    out.problem = load_problem(base_dir / pj.at("file").get<std::string>());
  } else {
    out.problem = problem_from_json(pj, base_dir);
  }

  out.algorithm = j.value("algorithm", std::string("superiorized"));
  if (out.algorithm != "basic" && out.algorithm != "superiorized" &&
      out.algorithm != "superiorized_restarts") {
    fail("unknown algorithm \"" + out.algorithm + "\"");
  }
  if (j.contains("schedule")) {
    out.schedule = schedule_spec_from_json(j.at("schedule"));
  }
  if (out.algorithm == "superiorized_restarts" &&
      out.schedule.window == kNoRestart) {
    fail("superiorized_restarts requires a finite schedule window");
  }

  if (j.contains("run")) {
    const auto& r = j.at("run");
    out.run.perturbations_per_iteration = r.value("perturbations", 1);
    out.run.max_outer_iterations = r.value("max_iterations", 100000L);
    if (r.contains("proximity_threshold") && !r.at("proximity_threshold").is_null()) {
      out.run.proximity_threshold = r.at("proximity_threshold").get<double>();
    }
    out.run.guard_limit = r.value("guard_limit", 200);
    const std::string mode = r.value("trace", std::string("summary"));
    if (mode == "full") {
      out.run.trace = TraceMode::full;
    } else if (mode == "summary") {
      out.run.trace = TraceMode::summary;
    } else if (mode == "final") {
      out.run.trace = TraceMode::final_only;
    } else {
      fail("trace mode must be full, summary or final");
    }
  }
  if (j.contains("start")) {
    out.start = vector_from_json(j.at("start"), "start");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Outputs

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot write " + path.string());
  out << text;
  if (!out) fail("failed while writing " + path.string());
}

void write_trace_csv(const std::filesystem::path& path,
                     const IterationTrace& trace) {
  std::string text = "k,proximity";
  for (const auto& label : trace.target_labels) text += "," + label;
  text += ",step,candidates,restart,guard_events";
  const bool snapshots = !trace.iterates.empty();
  if (snapshots) {
    const Index d = trace.iterates.front().size();
    for (Index i = 0; i < d; ++i) text += ",y_" + std::to_string(i);
    for (Index i = 0; i < d; ++i) text += ",p_" + std::to_string(i);
  }
  text += '\n';
  for (std::size_t r = 0; r < trace.records.size(); ++r) {
    const auto& row = trace.records[r];
    text += std::to_string(row.k);
    text += ',' + format_double(row.proximity);
    for (const double t : row.targets) text += ',' + format_double(t);
    text += ',' + format_double(row.step_sum);
    text += ',' + std::to_string(row.candidates);
    text += row.restart ? ",1" : ",0";
    text += ',' + std::to_string(row.guard_events);
    if (snapshots) {
      const Vector& y = trace.iterates[r];
      const Vector& p = trace.perturbed[r];
      for (Index i = 0; i < y.size(); ++i) text += ',' + format_double(y[i]);
      for (Index i = 0; i < p.size(); ++i) text += ',' + format_double(p[i]);
    }
    text += '\n';
  }
  write_text(path, text);
}

void write_grid_csv(const std::filesystem::path& path, const Matrix& grid) {
  save_matrix_csv(path, grid);
}

void write_grid_pgm(const std::filesystem::path& path, const Matrix& grid) {
  const double lo = grid.minCoeff();
  const double hi = grid.maxCoeff();
  const double span = hi - lo;
  std::string text = "P2\n" + std::to_string(grid.cols()) + " " +
                     std::to_string(grid.rows()) + "\n255\n";
  for (Index r = 0; r < grid.rows(); ++r) {
    for (Index c = 0; c < grid.cols(); ++c) {
      const int level =
          span > 0 ? static_cast<int>(255.0 * (grid(r, c) - lo) / span + 0.5) : 0;
      if (c) text += ' ';
      text += std::to_string(level);
    }
    text += '\n';
  }
  write_text(path, text);
}

std::string to_json(const experiments::GuaranteePair& pair) {
  json j;
  j["start"] = vector_to_json(pair.start);
  j["basic"] = trace_to_json(pair.basic);
  j["superiorized"] = trace_to_json(pair.superiorized);
  return dump(j);
}

std::string to_json(const experiments::BallsResult& result) {
  json runs = json::array();
  for (const auto& run : result.runs) {
    json r = trace_to_json(run.trace);
    r["label"] = run.label;
    r["final_norm"] = run.final_norm;
    runs.push_back(std::move(r));
  }
  return dump(json{{"runs", runs}});
}

std::string to_json(const experiments::MonteCarloReport& report) {
  json kernels = json::array();
  const double denom = report.runs > 0 ? static_cast<double>(report.runs) : 1.0;
  auto pair_json = [&](const experiments::PairTally& t, const char* first,
                       const char* second) {
    return json{{first, t.first_wins},
                {second, t.second_wins},
                {std::string(first) + "_pct", 100.0 * t.first_wins / denom},
                {std::string(second) + "_pct", 100.0 * t.second_wins / denom}};
  };
  for (const auto& k : report.kernels) {
    kernels.push_back(json{{"kernel", k.kernel},
                           {"ap_vs_sup", pair_json(k.ap_vs_sup, "ap", "sup")},
                           {"ap_vs_res", pair_json(k.ap_vs_res, "ap", "res")},
                           {"sup_vs_res", pair_json(k.sup_vs_res, "sup", "res")}});
  }
  json j;
  j["runs"] = report.runs;
  j["seed"] = report.seed;
  j["iterations"] = report.iterations;
  j["window"] = report.window;
  j["win_margin"] = report.win_margin;
  j["resampled_instances"] = report.resampled_instances;
  j["kernels"] = kernels;
  return dump(j);
}

std::string to_json(const experiments::Exp2Result& result) {
  json j;
  j["basic"] = trace_to_json(result.basic);
  j["superiorized"] = trace_to_json(result.superiorized);
  j["basic_x"] = vector_to_json(result.basic_x);
  j["basic_y"] = vector_to_json(result.basic_y);
  j["superiorized_x"] = vector_to_json(result.sup_x);
  j["superiorized_y"] = vector_to_json(result.sup_y);
  return dump(j);
}

std::string to_json(const experiments::ImrtRunReport& report) {
  json runs = json::array();
  for (const auto& run : report.runs) {
    json r;
    r["algorithm"] = experiments::to_string(run.algorithm);
    r["tumor_tv"] = run.tumor_tv;
    r["iterations"] = run.iterations;
    r["termination"] = stop_reason_json(run.reason);
    r["restarts"] = run.trace.restarts;
    r["accepted_step_total"] = run.trace.accepted_step_total;
    runs.push_back(std::move(r));
  }
  json j;
  j["instance_seed"] = report.instance_seed;
  j["start_seed"] = report.start_seed;
  j["proximity_threshold"] = report.proximity_threshold;
  j["all_converged"] = report.all_converged;
  j["runs"] = runs;
  return dump(j);
}

std::string trace_summary_json(const IterationTrace& trace) {
  return dump(trace_to_json(trace));
}

std::string montecarlo_table_csv(const experiments::MonteCarloReport& report) {
  std::string text =
      "kernel,ap_vs_sup_ap,ap_vs_sup_sup,ap_vs_res_ap,ap_vs_res_res,"
      "sup_vs_res_sup,sup_vs_res_res\n";
  const double denom = report.runs > 0 ? static_cast<double>(report.runs) : 1.0;
  auto pct = [&](long wins) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", 100.0 * static_cast<double>(wins) / denom);
    return std::string(buf);
  };
  for (const auto& k : report.kernels) {
    char kernel[32];
    std::snprintf(kernel, sizeof kernel, "%g", k.kernel);
    text += std::string(kernel) + ',' + pct(k.ap_vs_sup.first_wins) + ',' +
            pct(k.ap_vs_sup.second_wins) + ',' + pct(k.ap_vs_res.first_wins) +
            ',' + pct(k.ap_vs_res.second_wins) + ',' +
            pct(k.sup_vs_res.first_wins) + ',' + pct(k.sup_vs_res.second_wins) +
            '\n';
  }
  return text;
}

std::string timings_json(
    const std::vector<std::pair<std::string, double>>& entries) {
  json j = json::object();
  for (const auto& [name, seconds] : entries) j[name] = seconds;
  return dump(json{{"wall_seconds", j}});
}

// ---------------------------------------------------------------------------
// Dose-planning instances

void save_imrt_instance(const std::filesystem::path& dir,
                        const experiments::ImrtInstance& inst) {
  std::filesystem::create_directories(dir);
  save_matrix_binary(dir / "dose_matrix.bin", inst.dose);
  json j;
  j["side"] = inst.side;
  j["beamlets"] = inst.beamlets;
  j["seed"] = inst.seed;
  j["tumors"] = inst.tumors;
  j["y_to_pixel"] = inst.y_to_pixel;
  j["dose_matrix"] = json{{"file", "dose_matrix.bin"}};
  j["x_ref"] = vector_to_json(inst.x_ref);
  j["y_ref"] = vector_to_json(inst.y_ref);
  j["organ_bounds"] = json::array({inst.organ_lower, inst.organ_upper});
  json tumor_bounds = json::array();
  for (std::size_t t = 0; t < inst.tumor_lower.size(); ++t) {
    tumor_bounds.push_back(json::array({inst.tumor_lower[t], inst.tumor_upper[t]}));
  }
  j["tumor_bounds"] = tumor_bounds;
  j["intensity_bounds"] =
      json::array({inst.intensity_lower, inst.intensity_upper});
  j["epsilons"] = inst.epsilons;
  write_text(dir / "instance.json", dump(j));
}

experiments::ImrtInstance load_imrt_instance(const std::filesystem::path& path) {
  const auto file = std::filesystem::is_directory(path) ? path / "instance.json"
                                                        : path;
  const json j = load_json_file(file);
  experiments::ImrtInstance inst;
  inst.side = j.at("side").get<Index>();
  inst.beamlets = j.at("beamlets").get<Index>();
  inst.seed = j.at("seed").get<std::uint64_t>();
  inst.tumors = j.at("tumors").get<std::vector<std::vector<Index>>>();
  inst.y_to_pixel = j.at("y_to_pixel").get<std::vector<Index>>();
  inst.dose = load_matrix(file.parent_path() /
                          j.at("dose_matrix").at("file").get<std::string>());
  inst.x_ref = vector_from_json(j.at("x_ref"), "x_ref");
  inst.y_ref = vector_from_json(j.at("y_ref"), "y_ref");
  inst.organ_lower = j.at("organ_bounds")[0].get<double>();
  inst.organ_upper = j.at("organ_bounds")[1].get<double>();
  for (const auto& b : j.at("tumor_bounds")) {
    inst.tumor_lower.push_back(b[0].get<double>());
    inst.tumor_upper.push_back(b[1].get<double>());
  }
  inst.intensity_lower = j.at("intensity_bounds")[0].get<double>();
  inst.intensity_upper = j.at("intensity_bounds")[1].get<double>();
  inst.epsilons = j.at("epsilons").get<std::vector<double>>();

  if (inst.dose.rows() != inst.pixels() || inst.dose.cols() != inst.beamlets ||
      inst.x_ref.size() != inst.beamlets || inst.y_ref.size() != inst.pixels() ||
      static_cast<Index>(inst.y_to_pixel.size()) != inst.pixels()) {
    fail("inconsistent instance file " + file.string());
  }
  return inst;
}

}  // namespace supr::io
