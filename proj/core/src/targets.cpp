#include "supr/targets.hpp"

#include <cmath>
#include <string>

namespace supr {

Vector Target::direction(const Vector& x) const {
  Vector v(x.size());
  direction_into(x, v);
  return v;
}

void Target::check_dim(Eigen::Ref<const Vector> x) const {
  if (dim() >= 0 && x.size() != dim()) {
    throw std::invalid_argument("target of dimension " + std::to_string(dim()) +
                                " evaluated on a vector of dimension " +
                                std::to_string(x.size()));
  }
}

// ---------------------------------------------------------------------------
// SquaredNorm

double SquaredNorm::value(Eigen::Ref<const Vector> x) const {
  const double sq = x.squaredNorm();
  return half_ ? 0.5 * sq : sq;
}

void SquaredNorm::direction_into(Eigen::Ref<const Vector> x,
                                 Eigen::Ref<Vector> v) const {
  const double nrm = x.norm();
  if (nrm == 0.0) {
    v.setZero();
  } else {
    v = x * (-1.0 / nrm);
  }
}

// ---------------------------------------------------------------------------
// LinearForm

LinearForm::LinearForm(Vector coefficients)
    : coefficients_(std::move(coefficients)) {
  if (!coefficients_.allFinite()) {
    throw ConfigError("linear form requires finite coefficients");
  }
  const double nrm = coefficients_.norm();
  unit_descent_ = nrm == 0.0 ? Vector::Zero(coefficients_.size())
                             : Vector(coefficients_ * (-1.0 / nrm));
}

double LinearForm::value(Eigen::Ref<const Vector> x) const {
  check_dim(x);
  return coefficients_.dot(x);
}

void LinearForm::direction_into(Eigen::Ref<const Vector> x,
                                Eigen::Ref<Vector> v) const {
  check_dim(x);
  v = unit_descent_;
}

TargetPtr negated_coordinate(Index dim, Index coordinate) {
  if (coordinate < 0 || coordinate >= dim) {
    throw ConfigError("negated coordinate index out of range");
  }
  Vector a = Vector::Zero(dim);
  a[coordinate] = -1.0;
  return std::make_shared<LinearForm>(std::move(a));
}

// ---------------------------------------------------------------------------
// ZeroTarget

void ZeroTarget::direction_into(Eigen::Ref<const Vector>,
                                Eigen::Ref<Vector> v) const {
  v.setZero();
}

// ---------------------------------------------------------------------------
// FixedDirectionTarget

FixedDirectionTarget::FixedDirectionTarget(TargetPtr base, Vector direction)
    : base_(std::move(base)), direction_(std::move(direction)) {
  if (!base_) throw ConfigError("fixed-direction target requires a base");
  if (direction_.norm() > 1.0 + 1e-12) {
    throw ConfigError("perturbation directions must have norm at most 1");
  }
  if (base_->dim() >= 0 && base_->dim() != direction_.size()) {
    throw ConfigError("fixed direction dimension mismatch");
  }
}

double FixedDirectionTarget::value(Eigen::Ref<const Vector> x) const {
  check_dim(x);
  return base_->value(x);
}

void FixedDirectionTarget::direction_into(Eigen::Ref<const Vector> x,
                                          Eigen::Ref<Vector> v) const {
  check_dim(x);
  v = direction_;
}

// ---------------------------------------------------------------------------
// TvGrid

namespace {
constexpr Index kUnoccupied = -1;
}

TvGrid::TvGrid(Index side) : rows_(side), cols_(side) {
  if (side < 1) throw ConfigError("TV grid side must be positive");
  cells_.resize(static_cast<std::size_t>(side * side));
  coord_of_.resize(cells_.size());
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    cells_[i] = static_cast<Index>(i);
    coord_of_[i] = static_cast<Index>(i);
  }
}

TvGrid::TvGrid(Index rows, Index cols, std::vector<Index> cells)
    : rows_(rows), cols_(cols), cells_(std::move(cells)) {
  if (rows_ < 1 || cols_ < 1) throw ConfigError("TV grid sides must be positive");
  if (cells_.empty()) throw ConfigError("masked TV grid requires at least one cell");
  coord_of_.assign(static_cast<std::size_t>(rows_ * cols_), kUnoccupied);
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    const Index cell = cells_[i];
    if (cell < 0 || cell >= rows_ * cols_) {
      throw ConfigError("masked TV cell index out of range");
    }
    if (coord_of_[static_cast<std::size_t>(cell)] != kUnoccupied) {
      throw ConfigError("masked TV cells must be distinct");
    }
    coord_of_[static_cast<std::size_t>(cell)] = static_cast<Index>(i);
  }
}

namespace {
/// One difference term of the TV sum. For interior terms (root == true)
/// the coordinates are (s,t), (s+1,t), (s,t+1); for boundary terms c2 < 0.
struct TvTerm {
  Index c0, c1, c2;
  double d1, d2;  // z[c0]-z[c1], z[c0]-z[c2]
  bool root;
};
}  // namespace

template <typename TermFn>
void TvGrid::for_each_term(Eigen::Ref<const Vector> z, TermFn&& fn) const {
  const auto coord = [&](Index s, Index t) {
    return coord_of_[static_cast<std::size_t>(s * cols_ + t)];
  };
  for (Index s = 0; s + 1 < rows_; ++s) {
    for (Index t = 0; t + 1 < cols_; ++t) {
      const Index c0 = coord(s, t), c1 = coord(s + 1, t), c2 = coord(s, t + 1);
      if (c0 == kUnoccupied || c1 == kUnoccupied || c2 == kUnoccupied) continue;
      fn(TvTerm{c0, c1, c2, z[c0] - z[c1], z[c0] - z[c2], true});
    }
  }
  for (Index s = 0; s + 1 < rows_; ++s) {
    const Index c0 = coord(s, cols_ - 1), c1 = coord(s + 1, cols_ - 1);
    if (c0 == kUnoccupied || c1 == kUnoccupied) continue;
    fn(TvTerm{c0, c1, kUnoccupied, z[c0] - z[c1], 0.0, false});
  }
  for (Index t = 0; t + 1 < cols_; ++t) {
    const Index c0 = coord(rows_ - 1, t), c1 = coord(rows_ - 1, t + 1);
    if (c0 == kUnoccupied || c1 == kUnoccupied) continue;
    fn(TvTerm{c0, c1, kUnoccupied, z[c0] - z[c1], 0.0, false});
  }
}

double TvGrid::value(Eigen::Ref<const Vector> z) const {
  check_dim(z);
  double total = 0.0;
  for_each_term(z, [&](const TvTerm& term) {
    total += term.root ? std::sqrt(term.d1 * term.d1 + term.d2 * term.d2)
                       : std::abs(term.d1);
  });
  return total;
}

Vector TvGrid::subgradient(Eigen::Ref<const Vector> z) const {
  check_dim(z);
  const double tiny = 1e-12 * (1.0 + z.cwiseAbs().maxCoeff());
  Vector u = Vector::Zero(z.size());
  std::vector<char> nondiff(static_cast<std::size_t>(z.size()), 0);
  for_each_term(z, [&](const TvTerm& term) {
    if (term.root) {
      const double h = std::sqrt(term.d1 * term.d1 + term.d2 * term.d2);
      if (h < tiny) {
        nondiff[term.c0] = nondiff[term.c1] = nondiff[term.c2] = 1;
      } else {
        u[term.c0] += (term.d1 + term.d2) / h;
        u[term.c1] -= term.d1 / h;
        u[term.c2] -= term.d2 / h;
      }
    } else {
      if (std::abs(term.d1) < tiny) {
        nondiff[term.c0] = nondiff[term.c1] = 1;
      } else {
        const double s = term.d1 > 0.0 ? 1.0 : -1.0;
        u[term.c0] += s;
        u[term.c1] -= s;
      }
    }
  });
  // A coordinate touched by any vanishing term has no partial derivative
  // there; the rule maps it to zero.
  for (Index i = 0; i < z.size(); ++i) {
    if (nondiff[static_cast<std::size_t>(i)]) u[i] = 0.0;
  }
  return u;
}

void TvGrid::direction_into(Eigen::Ref<const Vector> z,
                            Eigen::Ref<Vector> v) const {
  const Vector u = subgradient(z);
  const double nrm = u.norm();
  if (nrm == 0.0) {
    v.setZero();
  } else {
    v = u * (-1.0 / nrm);
  }
}

}  // namespace supr
