#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <utility>

#include "supr/experiments.hpp"
#include "supr/rng.hpp"

namespace supr::experiments {

ImrtPhantomSpec ImrtPhantomSpec::desk() { return ImrtPhantomSpec{}; }

ImrtPhantomSpec ImrtPhantomSpec::paper() {
  ImrtPhantomSpec spec;
  spec.side = 50;
  spec.beamlets = 2840;
  spec.tumors = 2;
  spec.tumor_pixels = 200;
  return spec;
}

std::vector<Index> ImrtInstance::pixel_to_y() const {
  std::vector<Index> inverse(static_cast<std::size_t>(pixels()), -1);
  for (std::size_t yi = 0; yi < y_to_pixel.size(); ++yi) {
    inverse[static_cast<std::size_t>(y_to_pixel[yi])] = static_cast<Index>(yi);
  }
  return inverse;
}

namespace {

/// Random-walk blob of the requested pixel count; cells of other structures
/// act as walls. Marks owner[] with the structure id.
std::vector<Index> grow_blob(Rng& rng, std::vector<int>& owner, Index side,
                             int structure, Index want) {
  const Index pixels = side * side;
  for (int attempt = 0; attempt < 20; ++attempt) {
    std::vector<Index> cells;
    cells.reserve(static_cast<std::size_t>(want));
    Index current = -1;
    for (int tries = 0; tries < 1000; ++tries) {
      const Index candidate =
          static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(pixels)));
      if (owner[static_cast<std::size_t>(candidate)] == -1) {
        current = candidate;
        break;
      }
    }
    if (current < 0) break;
    owner[static_cast<std::size_t>(current)] = structure;
    cells.push_back(current);

    Index neighbors[4];
    long steps = 0;
    const long step_cap = 400 * static_cast<long>(want);
    while (static_cast<Index>(cells.size()) < want && steps < step_cap) {
      ++steps;
      const Index row = current / side;
      const Index col = current % side;
      int count = 0;
      auto consider = [&](Index r, Index c) {
        if (r < 0 || r >= side || c < 0 || c >= side) return;
        const Index cell = r * side + c;
        const int own = owner[static_cast<std::size_t>(cell)];
        if (own == -1 || own == structure) neighbors[count++] = cell;
      };
      consider(row - 1, col);
      consider(row + 1, col);
      consider(row, col - 1);
      consider(row, col + 1);
      if (count == 0) break;  // walled in
      current = neighbors[rng.uniform_index(static_cast<std::uint64_t>(count))];
      if (owner[static_cast<std::size_t>(current)] == -1) {
        owner[static_cast<std::size_t>(current)] = structure;
        cells.push_back(current);
      }
    }
    if (static_cast<Index>(cells.size()) == want) {
      std::sort(cells.begin(), cells.end());
      return cells;
    }
    for (const Index c : cells) owner[static_cast<std::size_t>(c)] = -1;
  }
  throw ConfigError("failed to place a tumor structure of " +
                    std::to_string(want) + " pixels");
}

}  // namespace

ImrtInstance gen_imrt_instance(std::uint64_t seed, const ImrtPhantomSpec& spec) {
  if (spec.side < 2) throw ConfigError("cross-section side must be >= 2");
  const Index m = spec.side * spec.side;
  if (spec.beamlets < m) {
    throw ConfigError("beamlet count must be at least the pixel count");
  }
  if (spec.tumors < 0 || spec.tumor_pixels < 1 ||
      spec.tumors * spec.tumor_pixels > m / 2) {
    throw ConfigError("tumor structures do not fit the cross-section");
  }

  for (int attempt = 0; attempt < 5; ++attempt) {
    const std::uint64_t attempt_seed =
        attempt == 0 ? seed
                     : Rng::derive_stream(seed, 0xa77e0000ULL + attempt);
    Rng rng(attempt_seed);

    // Structures.
    std::vector<int> owner(static_cast<std::size_t>(m), -1);
    std::vector<std::vector<Index>> tumors;
    tumors.reserve(static_cast<std::size_t>(spec.tumors));
    for (int t = 0; t < spec.tumors; ++t) {
      tumors.push_back(grow_blob(rng, owner, spec.side, t, spec.tumor_pixels));
    }

    // Reference doses per pixel id: organ pixels in [0,15), tumor pixels in
    // [10,40).
    Vector dose_ref(m);
    for (Index j = 0; j < m; ++j) {
      dose_ref[j] = owner[static_cast<std::size_t>(j)] >= 0
                        ? rng.uniform(10.0, 40.0)
                        : rng.uniform(0.0, 15.0);
    }

    // Dense nonnegative V (beamlets x pixels), filled row-major, and the
    // dose matrix as its generalized left inverse (V^T V)^{-1} V^T.
    Matrix v(spec.beamlets, m);
    for (Index i = 0; i < spec.beamlets; ++i) {
      for (Index j = 0; j < m; ++j) v(i, j) = rng.uniform();
    }
    const Matrix gram = v.transpose() * v;
    Eigen::LLT<Matrix> llt(gram);
    if (llt.info() != Eigen::Success) continue;
    const Matrix dose_pixel_order = llt.solve(v.transpose());

    const Vector x_ref = v * dose_ref;
    const double residual = (dose_pixel_order * x_ref - dose_ref).norm();
    if (!(residual <= 1e-8 * (1.0 + dose_ref.norm()))) continue;  // reseed

    // Bound slacks.
    std::vector<double> eps;
    const std::size_t eps_count = 1 + 2 * static_cast<std::size_t>(spec.tumors) + 2;
    eps.reserve(eps_count);
    for (std::size_t i = 0; i < eps_count; ++i) {
      eps.push_back(rng.uniform_right_open(0.0, 1.0));
    }

    ImrtInstance inst;
    inst.side = spec.side;
    inst.beamlets = spec.beamlets;
    inst.tumors = std::move(tumors);
    inst.seed = attempt_seed;
    inst.epsilons = eps;

    double organ_max = 0.0;
    bool any_organ = false;
    for (Index j = 0; j < m; ++j) {
      if (owner[static_cast<std::size_t>(j)] == -1) {
        organ_max = any_organ ? std::max(organ_max, dose_ref[j]) : dose_ref[j];
        any_organ = true;
      }
    }
    inst.organ_lower = 0.0;
    inst.organ_upper = (any_organ ? organ_max : 0.0) + 5.0 * eps[0];

    for (int t = 0; t < spec.tumors; ++t) {
      double lo = dose_ref[inst.tumors[static_cast<std::size_t>(t)][0]];
      double hi = lo;
      for (const Index j : inst.tumors[static_cast<std::size_t>(t)]) {
        lo = std::min(lo, dose_ref[j]);
        hi = std::max(hi, dose_ref[j]);
      }
      inst.tumor_lower.push_back(lo - 5.0 * eps[1 + 2 * t]);
      inst.tumor_upper.push_back(hi + 5.0 * eps[2 + 2 * t]);
    }
    inst.intensity_lower =
        0.5 * (eps[eps_count - 2] + 1.0) * x_ref.minCoeff();
    inst.intensity_upper = (1.0 + 0.5 * eps[eps_count - 1]) * x_ref.maxCoeff();

    // y ordering: tumor structures in order, then the organ remainder.
    inst.y_to_pixel.reserve(static_cast<std::size_t>(m));
    for (const auto& structure : inst.tumors) {
      inst.y_to_pixel.insert(inst.y_to_pixel.end(), structure.begin(),
                             structure.end());
    }
    for (Index j = 0; j < m; ++j) {
      if (owner[static_cast<std::size_t>(j)] == -1) inst.y_to_pixel.push_back(j);
    }

    inst.dose.resize(m, spec.beamlets);
    inst.y_ref.resize(m);
    for (Index yi = 0; yi < m; ++yi) {
      const Index pixel = inst.y_to_pixel[static_cast<std::size_t>(yi)];
      inst.dose.row(yi) = dose_pixel_order.row(pixel);
      inst.y_ref[yi] = dose_ref[pixel];
    }
    inst.x_ref = x_ref;

    // The construction certifies feasibility of the reference pair; a
    // violation here is a programming error, not a data problem.
    const SplitProblem check = make_imrt_problem(inst);
    if (proximity(check, inst.x_ref, inst.y_ref) >
        feasibility_tolerance(inst.x_ref)) {
      throw std::logic_error("reference intensities violate the constraints");
    }
    if ((inst.dose * inst.x_ref - inst.y_ref).norm() >
        1e-8 * (1.0 + inst.y_ref.norm())) {
      throw std::logic_error("reference doses drifted under permutation");
    }
    return inst;
  }
  throw ConfigError("could not draw a well-conditioned dose matrix in 5 attempts");
}

SplitProblem make_imrt_problem(const ImrtInstance& inst) {
  const Index m = inst.pixels();
  const Index n = inst.beamlets;
  const Index tumor_count = static_cast<Index>(inst.tumors.size());

  std::vector<int> labels(static_cast<std::size_t>(m));
  std::map<int, std::pair<double, double>> intervals;
  std::vector<Index> block_sizes;
  Index offset = 0;
  for (Index t = 0; t < tumor_count; ++t) {
    const Index size = static_cast<Index>(inst.tumors[static_cast<std::size_t>(t)].size());
    std::fill_n(labels.begin() + offset, size, static_cast<int>(t));
    intervals[static_cast<int>(t)] = {inst.tumor_lower[static_cast<std::size_t>(t)],
                                      inst.tumor_upper[static_cast<std::size_t>(t)]};
    block_sizes.push_back(size);
    offset += size;
  }
  const Index organ_size = m - offset;
  if (organ_size > 0) {
    std::fill_n(labels.begin() + offset, organ_size, static_cast<int>(tumor_count));
    intervals[static_cast<int>(tumor_count)] = {inst.organ_lower,
                                                inst.organ_upper};
    block_sizes.push_back(organ_size);
  }

  std::vector<TargetPtr> block_targets;
  for (Index t = 0; t < tumor_count; ++t) {
    const auto& structure = inst.tumors[static_cast<std::size_t>(t)];
    Index row_lo = inst.side, row_hi = -1, col_lo = inst.side, col_hi = -1;
    for (const Index p : structure) {
      row_lo = std::min(row_lo, p / inst.side);
      row_hi = std::max(row_hi, p / inst.side);
      col_lo = std::min(col_lo, p % inst.side);
      col_hi = std::max(col_hi, p % inst.side);
    }
    const Index bounding = std::max(row_hi - row_lo + 1, col_hi - col_lo + 1);
    std::vector<Index> cells;
    cells.reserve(structure.size());
    for (const Index p : structure) {
      cells.push_back((p / inst.side - row_lo) * bounding +
                      (p % inst.side - col_lo));
    }
    block_targets.push_back(
        std::make_shared<TvGrid>(bounding, bounding, std::move(cells)));
  }
  if (organ_size > 0) block_targets.push_back(std::make_shared<ZeroTarget>());

  SplitProblem prob{{std::make_shared<Box>(
                        Vector::Constant(n, inst.intensity_lower),
                        Vector::Constant(n, inst.intensity_upper))},
                    {std::make_shared<LabeledIntervalSet>(std::move(labels),
                                                          std::move(intervals))},
                    inst.dose,
                    BlockPartition(std::move(block_sizes)),
                    std::make_shared<ZeroTarget>(),
                    std::move(block_targets)};
  prob.validate();
  return prob;
}

Matrix dose_grid(const ImrtInstance& inst, const Vector& y) {
  if (y.size() != inst.pixels()) {
    throw std::invalid_argument("dose vector has wrong dimension");
  }
  Matrix grid(inst.side, inst.side);
  for (Index yi = 0; yi < y.size(); ++yi) {
    const Index pixel = inst.y_to_pixel[static_cast<std::size_t>(yi)];
    grid(pixel / inst.side, pixel % inst.side) = y[yi];
  }
  return grid;
}

std::string to_string(ImrtAlgorithm algo) {
  switch (algo) {
    case ImrtAlgorithm::basic:
      return "basic";
    case ImrtAlgorithm::superiorized:
      return "superiorized";
    case ImrtAlgorithm::superiorized_restarts:
      return "superiorized_restarts";
  }
  return "unknown";
}

ImrtAlgoParams imrt_default_params(ImrtAlgorithm algo) {
  ImrtAlgoParams params;
  switch (algo) {
    case ImrtAlgorithm::basic:
      break;
    case ImrtAlgorithm::superiorized:
      params.alpha = 0.999;
      params.scale = 100000.0;
      params.window = kNoRestart;
      params.perturbations = 5;
      break;
    case ImrtAlgorithm::superiorized_restarts:
      params.alpha = 0.99;
      params.scale = 100.0;
      params.window = 20;
      params.perturbations = 5;
      break;
  }
  return params;
}

ImrtRunReport run_exp3(const ImrtInstance& inst,
                       const std::vector<ImrtAlgorithm>& algos,
                       std::uint64_t start_seed, const RunConfig& base_cfg) {
  const SplitProblem prob = make_imrt_problem(inst);
  const AlgorithmicOperator op = build_mssfp_operator(prob);
  const Index tumor_count = static_cast<Index>(inst.tumors.size());

  Rng rng(start_seed);
  Vector x0(inst.beamlets);
  for (Index i = 0; i < x0.size(); ++i) {
    x0[i] = rng.uniform(inst.intensity_lower, inst.intensity_upper);
  }

  ImrtRunReport report;
  report.instance_seed = inst.seed;
  report.start_seed = start_seed;
  report.proximity_threshold = base_cfg.proximity_threshold.value_or(0.0);
  report.all_converged = true;

  for (const ImrtAlgorithm algo : algos) {
    const ImrtAlgoParams params = imrt_default_params(algo);
    RunConfig cfg = base_cfg;
    cfg.perturbations_per_iteration = params.perturbations;

    ImrtRunResult result;
    result.algorithm = algo;
    if (algo == ImrtAlgorithm::basic) {
      result.trace = run_smp_basic(prob, op, x0, cfg);
    } else {
      KernelSchedule kernel(params.alpha, params.scale);
      if (params.window == kNoRestart) {
        result.trace = run_smp_superiorized(prob, op, kernel, x0, cfg);
      } else {
        RestartSchedule sched(kernel, params.window);
        result.trace = run_smp_superiorized(prob, op, sched, x0, cfg);
      }
    }
    result.iterations = result.trace.iterations;
    result.reason = result.trace.reason;
    result.wall_seconds = result.trace.wall_seconds;
    result.final_x = result.trace.final_iterate.head(inst.beamlets);
    result.final_y = result.trace.final_iterate.tail(inst.pixels());
    for (Index t = 0; t < tumor_count; ++t) {
      const auto& target = prob.block_targets[static_cast<std::size_t>(t)];
      result.tumor_tv.push_back(target->value(
          result.final_y.segment(prob.blocks.offset(t), prob.blocks.size(t))));
    }
    if (result.reason != StopReason::proximity) report.all_converged = false;
    report.runs.push_back(std::move(result));
  }
  return report;
}

}  // namespace supr::experiments
