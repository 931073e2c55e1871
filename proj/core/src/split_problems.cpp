#include "supr/split_problems.hpp"

#include <algorithm>
#include <utility>

namespace supr {

BlockPartition::BlockPartition(std::vector<Index> sizes)
    : sizes_(std::move(sizes)) {
  if (sizes_.empty()) throw ConfigError("block partition must be nonempty");
  offsets_.reserve(sizes_.size());
  for (const Index s : sizes_) {
    if (s <= 0) throw ConfigError("block sizes must be positive");
    offsets_.push_back(total_);
    total_ += s;
  }
}

void SplitProblem::validate() const {
  if (a.size() == 0 || !a.allFinite()) {
    throw ConfigError("split problem requires a finite nonempty matrix");
  }
  if (c_sets.empty() || q_sets.empty()) {
    throw ConfigError("split problem requires at least one set per family");
  }
  for (const auto& c : c_sets) {
    if (!c || c->dim() != n()) {
      throw ConfigError("every C set must live in the x-space R^n");
    }
  }
  for (const auto& q : q_sets) {
    if (!q || q->dim() != m()) {
      throw ConfigError("every Q set must live in the y-space R^m");
    }
  }
  if (blocks.count() == 0 || blocks.total() != m()) {
    throw ConfigError("block partition must be nonempty and sum to the row "
                      "count of A");
  }
  if (static_cast<Index>(block_targets.size()) != blocks.count()) {
    throw ConfigError("expected one block target per block");
  }
  if (!x_target) throw ConfigError("missing x-space target");
  if (x_target->dim() >= 0 && x_target->dim() != n()) {
    throw ConfigError("x-space target has wrong dimension");
  }
  for (Index b = 0; b < blocks.count(); ++b) {
    const auto& t = block_targets[static_cast<std::size_t>(b)];
    if (!t) throw ConfigError("missing block target");
    if (t->dim() >= 0 && t->dim() != blocks.size(b)) {
      throw ConfigError("block target dimension mismatch for block " +
                        std::to_string(b));
    }
  }
}

AlgorithmicOperator::AlgorithmicOperator(std::vector<ConvexSetPtr> stages)
    : stages_(std::move(stages)) {
  for (const auto& s : stages_) {
    if (!s) throw ConfigError("operator stage is null");
    if (dim_ == 0) {
      dim_ = s->dim();
    } else if (s->dim() != dim_) {
      throw ConfigError("operator stages have mismatched dimensions");
    }
  }
}

void AlgorithmicOperator::apply_in_place(Vector& z) const {
  if (!stages_.empty() && z.size() != dim_) {
    throw std::invalid_argument("operator applied to a vector of wrong size");
  }
  for (const auto& s : stages_) {
    s->project_into(z, z);
  }
}

Vector AlgorithmicOperator::apply(const Vector& z) const {
  Vector out = z;
  apply_in_place(out);
  return out;
}

ProximityEvaluator::ProximityEvaluator(std::vector<Term> terms)
    : terms_(std::move(terms)) {
  for (const auto& t : terms_) {
    if (!t.set || t.offset < 0) throw ConfigError("bad proximity term");
  }
}

double ProximityEvaluator::operator()(const Vector& z) const {
  double total = 0.0;
  for (const auto& t : terms_) {
    const Index d = t.set->dim();
    if (t.offset + d > z.size()) {
      throw std::invalid_argument("proximity term out of range");
    }
    total += t.set->distance(z.segment(t.offset, d));
  }
  return total;
}

AlgorithmicOperator build_mssfp_operator(const SplitProblem& prob) {
  prob.validate();
  const Index n = prob.n();
  const Index m = prob.m();
  const std::size_t pairs = std::max(prob.c_sets.size(), prob.q_sets.size());
  std::vector<ConvexSetPtr> stages;
  stages.reserve(pairs + 1);
  for (std::size_t i = 0; i < pairs; ++i) {
    ConvexSetPtr cs = i < prob.c_sets.size() ? prob.c_sets[i]
                                             : std::make_shared<FullSpace>(n);
    ConvexSetPtr qs = i < prob.q_sets.size() ? prob.q_sets[i]
                                             : std::make_shared<FullSpace>(m);
    stages.push_back(std::make_shared<ProductSet>(std::vector<ProductSet::Factor>{
        {std::move(cs), 0}, {std::move(qs), n}}));
  }
  stages.push_back(std::make_shared<AffineGraphProjector>(prob.a));
  return AlgorithmicOperator(std::move(stages));
}

std::vector<Vector> block_image(const SplitProblem& prob, const Vector& x) {
  if (x.size() != prob.n()) {
    throw std::invalid_argument("block_image: x has wrong dimension");
  }
  // One full product, then views; blockwise multiplication would reorder
  // the accumulation.
  const Vector y = prob.a * x;
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(prob.blocks.count()));
  for (Index b = 0; b < prob.blocks.count(); ++b) {
    out.emplace_back(y.segment(prob.blocks.offset(b), prob.blocks.size(b)));
  }
  return out;
}

Vector assemble_perturbation(const BlockPartition& blocks, const Vector& x_dir,
                             const std::vector<Vector>& block_dirs,
                             double eta) {
  if (static_cast<Index>(block_dirs.size()) != blocks.count()) {
    throw ConfigError("assemble_perturbation: one direction per block required");
  }
  const Index n = x_dir.size();
  Vector out(n + blocks.total());
  out.head(n) = eta * x_dir;
  for (Index b = 0; b < blocks.count(); ++b) {
    const Vector& v = block_dirs[static_cast<std::size_t>(b)];
    if (v.size() != blocks.size(b)) {
      throw ConfigError("assemble_perturbation: direction size mismatch for "
                        "block " + std::to_string(b));
    }
    out.segment(n + blocks.offset(b), blocks.size(b)) = eta * v;
  }
  return out;
}

ProximityEvaluator make_smp_proximity(const SplitProblem& prob) {
  std::vector<ProximityEvaluator::Term> terms;
  terms.reserve(prob.c_sets.size() + prob.q_sets.size());
  for (const auto& c : prob.c_sets) terms.push_back({c, 0});
  for (const auto& q : prob.q_sets) terms.push_back({q, prob.n()});
  return ProximityEvaluator(std::move(terms));
}

double proximity(const SplitProblem& prob, const Vector& x, const Vector& y) {
  if (x.size() != prob.n() || y.size() != prob.m()) {
    throw std::invalid_argument("proximity: dimension mismatch");
  }
  Vector z(x.size() + y.size());
  z << x, y;
  return make_smp_proximity(prob)(z);
}

}  // namespace supr
