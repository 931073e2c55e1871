#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace supr {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Malformed problem data or configuration (bad dimensions, unknown kinds,
/// inconsistent partitions). Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterate left the representable range (NaN or infinity). Exit code 3.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A run hit its iteration cap before reaching the requested proximity.
/// Exit code 4.
class NonConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scale-aware tolerance for set membership checks.
inline double feasibility_tolerance(const Vector& x) {
  return 1e-9 * (1.0 + x.norm());
}

/// Scale-aware tolerance for linear residuals such as ||A x - y||.
inline double linear_residual_tolerance(const Vector& z) {
  return 1e-10 * (1.0 + z.norm());
}

}  // namespace supr
