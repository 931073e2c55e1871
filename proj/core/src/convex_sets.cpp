#include "supr/convex_sets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace supr {

Vector ConvexSet::project(const Vector& x) const {
  Vector out(x.size());
  project_into(x, out);
  return out;
}

double ConvexSet::distance(const Vector& x) const {
  return (x - project(x)).norm();
}

bool ConvexSet::contains(const Vector& x) const {
  return distance(x) <= feasibility_tolerance(x);
}

void ConvexSet::check_dim(Eigen::Ref<const Vector> x) const {
  if (x.size() != dim()) {
    throw std::invalid_argument("convex set of dimension " +
                                std::to_string(dim()) +
                                " applied to a vector of dimension " +
                                std::to_string(x.size()));
  }
}

// ---------------------------------------------------------------------------
// HalfSpace

HalfSpace::HalfSpace(Vector normal, double offset)
    : normal_(std::move(normal)), offset_(offset) {
  const double nsq = normal_.squaredNorm();
  if (!(nsq > 0.0) || !normal_.allFinite() || !std::isfinite(offset_)) {
    throw ConfigError("half-space requires a finite nonzero normal");
  }
  inv_norm_sq_ = 1.0 / nsq;
}

void HalfSpace::project_into(Eigen::Ref<const Vector> x,
                             Eigen::Ref<Vector> out) const {
  check_dim(x);
  const double violation = normal_.dot(x) - offset_;
  if (violation <= 0.0) {
    out = x;
  } else {
    out = x - (violation * inv_norm_sq_) * normal_;
  }
}

// ---------------------------------------------------------------------------
// Box

Box::Box(Vector lower, Vector upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size()) {
    throw ConfigError("box bounds have mismatched dimensions");
  }
  for (Index i = 0; i < lower_.size(); ++i) {
    if (std::isnan(lower_[i]) || std::isnan(upper_[i]) ||
        lower_[i] > upper_[i]) {
      throw ConfigError("box requires lower <= upper in every coordinate");
    }
  }
}

Box Box::cube(Index dim, double lo, double hi) {
  return Box(Vector::Constant(dim, lo), Vector::Constant(dim, hi));
}

void Box::project_into(Eigen::Ref<const Vector> x,
                       Eigen::Ref<Vector> out) const {
  check_dim(x);
  out = x.cwiseMax(lower_).cwiseMin(upper_);
}

// ---------------------------------------------------------------------------
// Ball

Ball::Ball(Vector center, double radius)
    : center_(std::move(center)), radius_(radius) {
  if (!(radius_ > 0.0) || !center_.allFinite()) {
    throw ConfigError("ball requires a finite center and radius > 0");
  }
}

void Ball::project_into(Eigen::Ref<const Vector> x,
                        Eigen::Ref<Vector> out) const {
  check_dim(x);
  const double dist = (x - center_).norm();
  if (dist <= radius_) {
    out = x;
  } else {
    out = center_ + (radius_ / dist) * (x - center_);
  }
}

// ---------------------------------------------------------------------------
// LabeledIntervalSet

LabeledIntervalSet::LabeledIntervalSet(
    std::vector<int> labels, std::map<int, std::pair<double, double>> intervals)
    : labels_(std::move(labels)), intervals_(std::move(intervals)) {
  for (const auto& [label, iv] : intervals_) {
    if (std::isnan(iv.first) || std::isnan(iv.second) || iv.first > iv.second) {
      throw ConfigError("interval for label " + std::to_string(label) +
                        " requires lo <= hi");
    }
  }
  lower_.resize(static_cast<Index>(labels_.size()));
  upper_.resize(static_cast<Index>(labels_.size()));
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const auto it = intervals_.find(labels_[i]);
    if (it == intervals_.end()) {
      throw ConfigError("coordinate " + std::to_string(i) +
                        " carries unknown label " +
                        std::to_string(labels_[i]));
    }
    lower_[static_cast<Index>(i)] = it->second.first;
    upper_[static_cast<Index>(i)] = it->second.second;
  }
}

void LabeledIntervalSet::project_into(Eigen::Ref<const Vector> x,
                                      Eigen::Ref<Vector> out) const {
  check_dim(x);
  out = x.cwiseMax(lower_).cwiseMin(upper_);
}

// ---------------------------------------------------------------------------
// FullSpace

void FullSpace::project_into(Eigen::Ref<const Vector> x,
                             Eigen::Ref<Vector> out) const {
  check_dim(x);
  if (out.data() != x.data()) out = x;
}

// ---------------------------------------------------------------------------
// AffineGraphProjector

AffineGraphProjector::AffineGraphProjector(Matrix a) : a_(std::move(a)) {
  if (a_.size() == 0 || !a_.allFinite()) {
    throw ConfigError("affine graph requires a nonempty finite matrix");
  }
  Matrix gram = a_ * a_.transpose();
  gram.diagonal().array() += 1.0;  // A A^T + I, always SPD
  llt_.compute(gram);
  if (llt_.info() != Eigen::Success) {
    throw ConfigError("factorization of A A^T + I failed");
  }
}

void AffineGraphProjector::project_into(Eigen::Ref<const Vector> x,
                                        Eigen::Ref<Vector> out) const {
  check_dim(x);
  const Index n = a_.cols();
  const Index m = a_.rows();
  Vector residual = a_ * x.head(n) - x.tail(m);
  Vector s = llt_.solve(residual);
  out.head(n) = x.head(n) - a_.transpose() * s;
  out.tail(m) = x.tail(m) + s;
}

double AffineGraphProjector::graph_residual(const Vector& z) const {
  check_dim(z);
  return (a_ * z.head(a_.cols()) - z.tail(a_.rows())).norm();
}

// ---------------------------------------------------------------------------
// ProductSet

ProductSet::ProductSet(std::vector<Factor> factors)
    : factors_(std::move(factors)) {
  if (factors_.empty()) {
    throw ConfigError("product set requires at least one factor");
  }
  std::sort(factors_.begin(), factors_.end(),
            [](const Factor& a, const Factor& b) { return a.offset < b.offset; });
  Index expected = 0;
  for (const Factor& f : factors_) {
    if (!f.set) throw ConfigError("product set factor is null");
    if (f.offset != expected) {
      throw ConfigError("product set ranges must be disjoint and cover the "
                        "full dimension (gap or overlap at coordinate " +
                        std::to_string(expected) + ")");
    }
    expected += f.set->dim();
  }
  dim_ = expected;
}

void ProductSet::project_into(Eigen::Ref<const Vector> x,
                              Eigen::Ref<Vector> out) const {
  check_dim(x);
  for (const Factor& f : factors_) {
    const Index d = f.set->dim();
    f.set->project_into(x.segment(f.offset, d), out.segment(f.offset, d));
  }
}

}  // namespace supr
