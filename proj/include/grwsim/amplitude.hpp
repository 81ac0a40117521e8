#pragma once

#include <cmath>
#include <complex>
#include <limits>

namespace grwsim {

/// Complex amplitude stored as (log-magnitude, phase).
///
/// Collapse dynamics leaves residual branch amplitudes like e^-1000 that
/// ordinary doubles flush to zero; keeping the modulus in log space makes
/// those tails exact under multiplication and safe under addition.
/// log_magnitude == -inf encodes the exact zero; phase is then 0 by
/// convention. For finite log_magnitude the phase is kept in [-pi, pi).
class Amplitude {
 public:
  Amplitude() = default;  // zero

  static Amplitude zero() { return Amplitude(); }

  static Amplitude one() { return from_log_polar(0.0, 0.0); }

  static Amplitude from_log_polar(double log_magnitude, double phase) {
    Amplitude a;
    if (std::isinf(log_magnitude) && log_magnitude < 0) return a;
    a.log_mag_ = log_magnitude;
    a.phase_ = wrap_phase(phase);
    return a;
  }

  static Amplitude from_real(double x) {
    if (x == 0.0) return zero();
    return from_log_polar(std::log(std::fabs(x)), x < 0 ? pi() : 0.0);
  }

  static Amplitude from_complex(std::complex<double> z) {
    const double m = std::abs(z);
    if (m == 0.0) return zero();
    return from_log_polar(std::log(m), std::arg(z));
  }

  /// Amplitude whose squared magnitude is e^log_mass (phase 0).
  static Amplitude from_log_mass(double log_mass) {
    return from_log_polar(0.5 * log_mass, 0.0);
  }

  double log_magnitude() const { return log_mag_; }
  double phase() const { return phase_; }
  bool is_zero() const { return std::isinf(log_mag_) && log_mag_ < 0; }

  double log_squared_magnitude() const { return 2.0 * log_mag_; }
  double squared_magnitude() const { return std::exp(2.0 * log_mag_); }
  double magnitude() const { return std::exp(log_mag_); }

  /// Underflows for log magnitudes below about -745; callers that care
  /// about deep tails must stay in the log domain.
  std::complex<double> to_complex() const {
    if (is_zero()) return {0.0, 0.0};
    return std::polar(std::exp(log_mag_), phase_);
  }

  /// to_complex with the magnitude rescaled by e^-shift.
  std::complex<double> to_complex_shifted(double shift) const {
    if (is_zero()) return {0.0, 0.0};
    return std::polar(std::exp(log_mag_ - shift), phase_);
  }

  Amplitude conj() const {
    if (is_zero()) return *this;
    return from_log_polar(log_mag_, -phase_);
  }

  /// Magnitude scaled by e^log_factor, phase untouched.
  Amplitude scaled_mag(double log_factor) const {
    if (is_zero()) return *this;
    return from_log_polar(log_mag_ + log_factor, phase_);
  }

  friend Amplitude operator*(const Amplitude& a, const Amplitude& b) {
    if (a.is_zero() || b.is_zero()) return zero();
    return from_log_polar(a.log_mag_ + b.log_mag_, a.phase_ + b.phase_);
  }

  friend Amplitude operator/(const Amplitude& a, const Amplitude& b) {
    if (a.is_zero()) return zero();
    return from_log_polar(a.log_mag_ - b.log_mag_, a.phase_ - b.phase_);
  }

  // Addition shifts both operands by the larger log magnitude before
  // exponentiating, so operands any number of decades apart neither
  // overflow nor underflow the intermediate. Sums below the cancellation
  // noise floor of the shifted doubles collapse to the exact zero.
  friend Amplitude operator+(const Amplitude& a, const Amplitude& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const double m = a.log_mag_ > b.log_mag_ ? a.log_mag_ : b.log_mag_;
    const double ra = std::exp(a.log_mag_ - m);
    const double rb = std::exp(b.log_mag_ - m);
    const std::complex<double> z = std::polar(ra, a.phase_) + std::polar(rb, b.phase_);
    const double r = std::abs(z);
    if (r < 1e-15 * (ra + rb)) return zero();
    return from_log_polar(m + std::log(r), std::arg(z));
  }

  friend Amplitude operator-(const Amplitude& a, const Amplitude& b) {
    return a + b.negated();
  }

  Amplitude negated() const {
    if (is_zero()) return *this;
    return from_log_polar(log_mag_, phase_ + pi());
  }

  static constexpr double pi() { return 3.141592653589793238462643383279502884; }

  /// Wrap into [-pi, pi).
  static double wrap_phase(double phi) {
    double r = std::remainder(phi, 2.0 * pi());
    if (r >= pi()) r -= 2.0 * pi();
    if (r < -pi()) r += 2.0 * pi();
    return r;
  }

 private:
  double log_mag_ = -std::numeric_limits<double>::infinity();
  double phase_ = 0.0;
};

/// Streaming log-sum-exp over squared masses (or any log-domain weights).
/// Accumulation order is fixed by the caller, so results are deterministic.
class LogMassAccumulator {
 public:
  void add_log(double log_term) {
    if (std::isinf(log_term) && log_term < 0) return;
    if (std::isinf(max_) && max_ < 0) {
      max_ = log_term;
      sum_ = 1.0;
      return;
    }
    if (log_term <= max_) {
      // 60 nats below the running peak contributes < 1e-26 relative
      if (log_term > max_ - 60.0) sum_ += std::exp(log_term - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - log_term) + 1.0;
      max_ = log_term;
    }
  }

  bool empty() const { return std::isinf(max_) && max_ < 0; }

  /// log of the accumulated sum; -inf when nothing was added.
  double log_total() const {
    if (empty()) return -std::numeric_limits<double>::infinity();
    return max_ + std::log(sum_);
  }

  double total() const { return std::exp(log_total()); }

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  double sum_ = 0.0;
};

}  // namespace grwsim
