#include "supr/schedules.hpp"

#include <cmath>
#include <utility>

namespace supr {

KernelSchedule::KernelSchedule(double alpha, double scale)
    : alpha_(alpha), scale_(scale) {
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw ConfigError("kernel alpha must lie strictly between 0 and 1");
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw ConfigError("step scale c must be positive and finite");
  }
}

double KernelSchedule::next_candidate() {
  ++ell_;
  current_ = ell_ == 0 ? scale_ : current_ * alpha_;
  return current_;
}

void KernelSchedule::reset_exponent(long long e) {
  ell_ = e;
  current_ = e < 0 ? 0.0 : scale_ * std::pow(alpha_, static_cast<double>(e));
}

RestartSchedule::RestartSchedule(KernelSchedule base,
                                 std::uint64_t constant_window)
    : base_(base), windows_([constant_window](std::uint64_t) {
        return constant_window;
      }) {
  if (constant_window == 0) {
    throw ConfigError("restart window must be a positive integer");
  }
}

RestartSchedule::RestartSchedule(KernelSchedule base, WindowSequence windows)
    : base_(base), windows_(std::move(windows)) {
  if (!windows_) throw ConfigError("restart window sequence is empty");
}

bool RestartSchedule::complete_outer_iteration() {
  ++within_window_;
  const std::uint64_t window = windows_(restarts_);
  if (window == 0) throw ConfigError("restart window must be positive");
  if (within_window_ < window) return false;
  // Restart: the next emitted candidate becomes c * alpha^(r+1), matching
  // the envelope ((alpha^(r+l))_{l<W_r})_r that keeps the series summable.
  base_.reset_exponent(static_cast<long long>(restarts_));
  ++restarts_;
  within_window_ = 0;
  return true;
}

}  // namespace supr
