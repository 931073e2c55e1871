#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>

#include "supr/common.hpp"

namespace supr {

/// Sentinel window meaning "never restart".
inline constexpr std::uint64_t kNoRestart =
    std::numeric_limits<std::uint64_t>::max();

/// Stateful generator of perturbation step-size candidates. Schedules are
/// mutable single-owner state machines: one schedule per engine run, never
/// shared across threads, cloneable for parallel Monte-Carlo runs.
class StepSchedule {
 public:
  virtual ~StepSchedule() = default;

  /// Advances the exponent and returns the next candidate step. Repeated
  /// calls model the inner while-loop's rejection and retry; rejected
  /// candidates permanently consume the exponent (no rewind). Candidates
  /// that underflow to zero are emitted as zero perturbations.
  virtual double next_candidate() = 0;

  /// Outer-iteration bookkeeping; returns true when a restart occurred.
  virtual bool complete_outer_iteration() = 0;

  /// Upper bound on the sum of every step the schedule can ever emit.
  virtual double series_upper_bound() const = 0;

  virtual std::unique_ptr<StepSchedule> clone() const = 0;

  /// Current exponent (starts at -1; the first candidate is c * alpha^0).
  virtual long long exponent() const = 0;
  virtual std::uint64_t restart_count() const { return 0; }
};

/// The geometric sequence {c * alpha^ell} with kernel alpha in (0,1).
class KernelSchedule final : public StepSchedule {
 public:
  KernelSchedule(double alpha, double scale);

  double next_candidate() override;
  bool complete_outer_iteration() override { return false; }
  double series_upper_bound() const override {
    return scale_ / (1.0 - alpha_);
  }
  std::unique_ptr<StepSchedule> clone() const override {
    return std::make_unique<KernelSchedule>(*this);
  }
  long long exponent() const override { return ell_; }

  double alpha() const { return alpha_; }
  double scale() const { return scale_; }

  /// Rewinds the exponent to e; the next candidate will be c * alpha^(e+1).
  void reset_exponent(long long e);

 private:
  double alpha_;
  double scale_;
  long long ell_ = -1;
  double current_ = 0.0;  // c * alpha^ell once ell >= 0
};

/// A kernel schedule whose exponent is periodically rewound: after W_r
/// completed outer iterations the exponent is reset so that the next window
/// of candidates starts at c * alpha^(r+1), where r counts restarts so far.
/// Whatever window sequence is chosen, every step the schedule can emit is
/// dominated by the doubly geometric envelope, so the total emitted sum
/// stays below c / (1 - alpha)^2.
class RestartSchedule final : public StepSchedule {
 public:
  using WindowSequence = std::function<std::uint64_t(std::uint64_t)>;

  RestartSchedule(KernelSchedule base, std::uint64_t constant_window);
  RestartSchedule(KernelSchedule base, WindowSequence windows);

  double next_candidate() override { return base_.next_candidate(); }
  bool complete_outer_iteration() override;
  double series_upper_bound() const override {
    const double one_minus = 1.0 - base_.alpha();
    return base_.scale() / (one_minus * one_minus);
  }
  std::unique_ptr<StepSchedule> clone() const override {
    return std::make_unique<RestartSchedule>(*this);
  }
  long long exponent() const override { return base_.exponent(); }
  std::uint64_t restart_count() const override { return restarts_; }

  const KernelSchedule& base() const { return base_; }
  std::uint64_t window_position() const { return within_window_; }

 private:
  KernelSchedule base_;
  WindowSequence windows_;
  std::uint64_t restarts_ = 0;       // r
  std::uint64_t within_window_ = 0;  // w
};

}  // namespace supr
