#pragma once

#include <memory>
#include <string>
#include <vector>

#include "supr/common.hpp"
#include "supr/convex_sets.hpp"
#include "supr/targets.hpp"

namespace supr {

/// Contiguous ordered partition of the y-space into B subvector blocks.
class BlockPartition {
 public:
  BlockPartition() = default;  // empty; rejected by SplitProblem::validate
  explicit BlockPartition(std::vector<Index> sizes);

  Index count() const { return static_cast<Index>(sizes_.size()); }
  Index total() const { return total_; }
  Index size(Index b) const { return sizes_[static_cast<std::size_t>(b)]; }
  Index offset(Index b) const { return offsets_[static_cast<std::size_t>(b)]; }
  const std::vector<Index>& sizes() const { return sizes_; }

 private:
  std::vector<Index> sizes_;
  std::vector<Index> offsets_;
  Index total_ = 0;
};

/// Data of a split minimization problem with subvectors: constraint
/// families {C_s} in the x-space and {Q_t} in the y-space, the coupling
/// matrix A in row blocks A_b, an x-space target f, and one target phi_b
/// per block. The matrix is stored once; blocks are row ranges over it.
struct SplitProblem {
  std::vector<ConvexSetPtr> c_sets;   // subsets of R^n
  std::vector<ConvexSetPtr> q_sets;   // subsets of R^m
  Matrix a;                           // m x n
  BlockPartition blocks;              // partition of m
  TargetPtr x_target;                 // f
  std::vector<TargetPtr> block_targets;  // phi_b, one per block

  Index n() const { return a.cols(); }
  Index m() const { return a.rows(); }

  /// Throws ConfigError on dimension or partition inconsistencies.
  void validate() const;
};

/// One stop of a sequential projection operator, applied left to right.
class AlgorithmicOperator {
 public:
  AlgorithmicOperator() = default;
  explicit AlgorithmicOperator(std::vector<ConvexSetPtr> stages);

  /// 0 for the empty (identity) composition.
  Index dim() const { return dim_; }
  bool empty() const { return stages_.empty(); }
  const std::vector<ConvexSetPtr>& stages() const { return stages_; }

  void apply_in_place(Vector& z) const;
  Vector apply(const Vector& z) const;

 private:
  std::vector<ConvexSetPtr> stages_;
  Index dim_ = 0;
};

/// Feasibility-violation functional: the sum of the distances from the
/// designated segments of the iterate to their sets.
class ProximityEvaluator {
 public:
  struct Term {
    ConvexSetPtr set;
    Index offset = 0;
  };

  ProximityEvaluator() = default;
  explicit ProximityEvaluator(std::vector<Term> terms);

  double operator()(const Vector& z) const;
  bool empty() const { return terms_.empty(); }
  const std::vector<Term>& terms() const { return terms_; }

 private:
  std::vector<Term> terms_;
};

/// The paired product-space operator
/// P_V o (P_{C_p} x P_{Q_p}) o ... o (P_{C_1} x P_{Q_1}) on R^(n+m).
/// When the two families differ in length the shorter one is padded with
/// full-space factors appended at the end, so existing pair order is kept.
AlgorithmicOperator build_mssfp_operator(const SplitProblem& prob);

/// Subvector images (A_1 x, ..., A_B x); their concatenation is exactly the
/// single product A x.
std::vector<Vector> block_image(const SplitProblem& prob, const Vector& x);

/// Stacks the x-direction and the per-block y-directions scaled by eta into
/// a single perturbation increment on R^(n+m).
Vector assemble_perturbation(const BlockPartition& blocks, const Vector& x_dir,
                             const std::vector<Vector>& block_dirs, double eta);

/// Proximity terms of the problem: every C_s on the x-segment plus every
/// Q_t on the y-segment (the graph set contributes zero by construction).
ProximityEvaluator make_smp_proximity(const SplitProblem& prob);

/// Sum of the distances from x to the C family and from y to the Q family.
double proximity(const SplitProblem& prob, const Vector& x, const Vector& y);

}  // namespace supr
