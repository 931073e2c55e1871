#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "supr/common.hpp"

namespace supr {

/// A closed convex set with an exact orthogonal projection. Sets are
/// immutable after construction and safe to share across threads; the
/// projections are pure functions.
class ConvexSet {
 public:
  virtual ~ConvexSet() = default;

  virtual Index dim() const = 0;

  /// Writes the projection of x into out. out may alias x.
  virtual void project_into(Eigen::Ref<const Vector> x,
                            Eigen::Ref<Vector> out) const = 0;

  Vector project(const Vector& x) const;

  /// ||x - project(x)||; zero iff x is feasible up to floating error.
  double distance(const Vector& x) const;

  /// Membership within feasibility_tolerance(x).
  bool contains(const Vector& x) const;

 protected:
  void check_dim(Eigen::Ref<const Vector> x) const;
};

using ConvexSetPtr = std::shared_ptr<const ConvexSet>;

/// {x : <normal, x> <= offset}. The normal need not be unit length.
class HalfSpace final : public ConvexSet {
 public:
  HalfSpace(Vector normal, double offset);

  Index dim() const override { return normal_.size(); }
  void project_into(Eigen::Ref<const Vector> x,
                    Eigen::Ref<Vector> out) const override;

  const Vector& normal() const { return normal_; }
  double offset() const { return offset_; }

 private:
  Vector normal_;
  double offset_;
  double inv_norm_sq_;
};

/// Coordinate-wise interval [lower_i, upper_i]; entries may be +-infinity.
class Box final : public ConvexSet {
 public:
  Box(Vector lower, Vector upper);

  /// The cube [lo, hi]^dim.
  static Box cube(Index dim, double lo, double hi);

  Index dim() const override { return lower_.size(); }
  void project_into(Eigen::Ref<const Vector> x,
                    Eigen::Ref<Vector> out) const override;

  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }

 private:
  Vector lower_, upper_;
};

class Ball final : public ConvexSet {
 public:
  Ball(Vector center, double radius);

  Index dim() const override { return center_.size(); }
  void project_into(Eigen::Ref<const Vector> x,
                    Eigen::Ref<Vector> out) const override;

  const Vector& center() const { return center_; }
  double radius() const { return radius_; }

 private:
  Vector center_;
  double radius_;
};

/// Per-coordinate interval clamp where each coordinate carries an integer
/// label and each label an interval. Every coordinate must have a known
/// label; intervals are compiled to per-coordinate bounds at construction.
class LabeledIntervalSet final : public ConvexSet {
 public:
  LabeledIntervalSet(std::vector<int> labels,
                     std::map<int, std::pair<double, double>> intervals);

  Index dim() const override { return lower_.size(); }
  void project_into(Eigen::Ref<const Vector> x,
                    Eigen::Ref<Vector> out) const override;

  const std::vector<int>& labels() const { return labels_; }
  const std::map<int, std::pair<double, double>>& intervals() const {
    return intervals_;
  }

 private:
  std::vector<int> labels_;
  std::map<int, std::pair<double, double>> intervals_;
  Vector lower_, upper_;
};

/// The whole space; projection is the identity. Used to pad the shorter
/// constraint family when assembling paired product-space operators.
class FullSpace final : public ConvexSet {
 public:
  explicit FullSpace(Index dim) : dim_(dim) {}

  Index dim() const override { return dim_; }
  void project_into(Eigen::Ref<const Vector> x,
                    Eigen::Ref<Vector> out) const override;

 private:
  Index dim_;
};

/// The graph {(x, y) : A x = y} of a linear map, i.e. the null space of
/// Z = [A, -I]. The projection is z - Z^T (Z Z^T)^{-1} Z z, with
/// Z Z^T = A A^T + I factored once (symmetric positive definite) at
/// construction and reused by every projection.
class AffineGraphProjector final : public ConvexSet {
 public:
  explicit AffineGraphProjector(Matrix a);

  Index dim() const override { return a_.cols() + a_.rows(); }
  void project_into(Eigen::Ref<const Vector> x,
                    Eigen::Ref<Vector> out) const override;

  Index domain_dim() const { return a_.cols(); }
  Index range_dim() const { return a_.rows(); }
  const Matrix& matrix() const { return a_; }

  /// ||A z_x - z_y||, the violation of the graph equation.
  double graph_residual(const Vector& z) const;

 private:
  Matrix a_;
  Eigen::LLT<Matrix> llt_;  // of A A^T + I
};

/// Cartesian product of factor sets over disjoint coordinate ranges that
/// cover the full dimension; projects factor-wise.
class ProductSet final : public ConvexSet {
 public:
  struct Factor {
    ConvexSetPtr set;
    Index offset = 0;
  };

  explicit ProductSet(std::vector<Factor> factors);

  Index dim() const override { return dim_; }
  void project_into(Eigen::Ref<const Vector> x,
                    Eigen::Ref<Vector> out) const override;

  const std::vector<Factor>& factors() const { return factors_; }

 private:
  std::vector<Factor> factors_;
  Index dim_;
};

}  // namespace supr
