#pragma once

#include <Eigen/Core>

#include <memory>
#include <vector>

#include "supr/common.hpp"

namespace supr {

/// A target (merit) function together with a nonascending-direction rule:
/// the returned direction v satisfies ||v|| <= 1 and phi(x + lambda v) <=
/// phi(x) for all small enough lambda >= 0. Directions follow the convex
/// rule u_i = d(phi)/dx_i where the partial exists (0 otherwise), v = 0 if
/// u = 0 and -u/||u|| otherwise. Targets are immutable and thread-safe.
class Target {
 public:
  virtual ~Target() = default;

  /// Expected input dimension, or -1 when any dimension is accepted.
  virtual Index dim() const = 0;

  virtual double value(Eigen::Ref<const Vector> x) const = 0;

  /// Writes the nonascending direction at x into v (same size as x).
  virtual void direction_into(Eigen::Ref<const Vector> x,
                              Eigen::Ref<Vector> v) const = 0;

  Vector direction(const Vector& x) const;

 protected:
  void check_dim(Eigen::Ref<const Vector> x) const;
};

using TargetPtr = std::shared_ptr<const Target>;

/// phi(x) = ||x||^2, or half of it; direction -x/||x|| either way.
class SquaredNorm final : public Target {
 public:
  explicit SquaredNorm(bool half = false) : half_(half) {}

  Index dim() const override { return -1; }
  double value(Eigen::Ref<const Vector> x) const override;
  void direction_into(Eigen::Ref<const Vector> x,
                      Eigen::Ref<Vector> v) const override;

 private:
  bool half_;
};

/// phi(x) = <a, x>; direction -a/||a|| everywhere.
class LinearForm final : public Target {
 public:
  explicit LinearForm(Vector coefficients);

  Index dim() const override { return coefficients_.size(); }
  double value(Eigen::Ref<const Vector> x) const override;
  void direction_into(Eigen::Ref<const Vector> x,
                      Eigen::Ref<Vector> v) const override;

  const Vector& coefficients() const { return coefficients_; }

 private:
  Vector coefficients_;
  Vector unit_descent_;
};

/// phi(x) = -x_i, a LinearForm convenience for "raise this coordinate".
TargetPtr negated_coordinate(Index dim, Index coordinate);

/// phi == 0 with zero directions; turns a superiorized run into the basic one.
class ZeroTarget final : public Target {
 public:
  Index dim() const override { return -1; }
  double value(Eigen::Ref<const Vector>) const override { return 0.0; }
  void direction_into(Eigen::Ref<const Vector> x,
                      Eigen::Ref<Vector> v) const override;
};

/// Evaluates like the wrapped target but always reports a caller-chosen
/// direction. Lets a run reproduce a hand-picked perturbation direction,
/// including ones that are not nonascending.
class FixedDirectionTarget final : public Target {
 public:
  FixedDirectionTarget(TargetPtr base, Vector direction);

  Index dim() const override { return direction_.size(); }
  double value(Eigen::Ref<const Vector> x) const override;
  void direction_into(Eigen::Ref<const Vector> x,
                      Eigen::Ref<Vector> v) const override;

  const TargetPtr& base() const { return base_; }
  const Vector& fixed_direction() const { return direction_; }

 private:
  TargetPtr base_;
  Vector direction_;
};

/// Total variation of a grid, on the flattened row-major vector. The full
/// form covers a square side x side array. The masked form embeds an
/// irregular cell set into a rows x cols bounding grid; a difference term
/// contributes only when every cell it touches is occupied, so masked-out
/// cells never enter the sum or the gradient.
///
/// Any coordinate whose partial derivative involves a vanishing absolute
/// value or root term (magnitude below 1e-12 * (1 + max|z_i|)) is treated
/// as nondifferentiable and its direction entry is zeroed.
class TvGrid final : public Target {
 public:
  /// Full square grid; input dimension side * side.
  explicit TvGrid(Index side);

  /// Masked grid: cells[i] is the row-major cell of input coordinate i.
  TvGrid(Index rows, Index cols, std::vector<Index> cells);

  Index dim() const override { return static_cast<Index>(cells_.size()); }
  double value(Eigen::Ref<const Vector> z) const override;
  void direction_into(Eigen::Ref<const Vector> z,
                      Eigen::Ref<Vector> v) const override;

  /// Unnormalized gradient with nondifferentiable coordinates zeroed.
  Vector subgradient(Eigen::Ref<const Vector> z) const;

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  const std::vector<Index>& cells() const { return cells_; }

 private:
  template <typename TermFn>
  void for_each_term(Eigen::Ref<const Vector> z, TermFn&& fn) const;

  Index rows_, cols_;
  std::vector<Index> cells_;        // coordinate -> cell
  std::vector<Index> coord_of_;     // cell -> coordinate or -1
};

}  // namespace supr
