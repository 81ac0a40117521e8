#pragma once

#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "grwsim/amplitude.hpp"
#include "grwsim/errors.hpp"

namespace grwsim {

/// Marble region labels. Index order is load-bearing: samplers walk the
/// alphabet in this order, which is what keeps the factorized and sparse
/// hit paths consuming identical random draws.
enum class Region : int { kIn = 0, kOut = 1 };

inline const char* region_name(Region r) { return r == Region::kIn ? "in" : "out"; }

/// One marble that can be inside or outside the box: a|in> + b|out>.
/// The factor must be normalized to 1e-12 (checked in the log domain).
class TwoRegionMarble {
 public:
  TwoRegionMarble(Amplitude amp_in, Amplitude amp_out, int marble_id = 0)
      : amp_in_(amp_in), amp_out_(amp_out), marble_id_(marble_id) {
    LogMassAccumulator acc;
    acc.add_log(amp_in_.log_squared_magnitude());
    acc.add_log(amp_out_.log_squared_magnitude());
    if (acc.empty()) throw ValidationError("marble factor must be nonzero");
    if (std::fabs(acc.log_total()) > 1e-12)
      throw ValidationError("marble factor must be normalized: |amp_in|^2 + |amp_out|^2 = 1 within 1e-12");
  }

  /// Factor with |in|^2 = in_mass, both coefficients real-positive.
  static TwoRegionMarble from_in_mass(double in_mass, int marble_id = 0) {
    if (in_mass < 0.0 || in_mass > 1.0)
      throw ValidationError("in_mass must lie in [0, 1]");
    return TwoRegionMarble(Amplitude::from_real(std::sqrt(in_mass)),
                           Amplitude::from_real(std::sqrt(1.0 - in_mass)), marble_id);
  }

  static TwoRegionMarble normalized(Amplitude amp_in, Amplitude amp_out, int marble_id = 0) {
    LogMassAccumulator acc;
    acc.add_log(amp_in.log_squared_magnitude());
    acc.add_log(amp_out.log_squared_magnitude());
    if (acc.empty()) throw DegenerateStateError("cannot normalize an all-zero marble factor");
    const double half = 0.5 * acc.log_total();
    return TwoRegionMarble(amp_in.scaled_mag(-half), amp_out.scaled_mag(-half), marble_id);
  }

  const Amplitude& amp_in() const { return amp_in_; }
  const Amplitude& amp_out() const { return amp_out_; }
  int marble_id() const { return marble_id_; }

  const Amplitude& amp(Region r) const { return r == Region::kIn ? amp_in_ : amp_out_; }

  double in_mass() const { return amp_in_.squared_magnitude(); }
  double out_mass() const { return amp_out_.squared_magnitude(); }
  double log_mass(Region r) const { return amp(r).log_squared_magnitude(); }

  Region dominant_region() const {
    return amp_in_.log_magnitude() >= amp_out_.log_magnitude() ? Region::kIn : Region::kOut;
  }

  double dominant_mass() const { return amp(dominant_region()).squared_magnitude(); }

 private:
  Amplitude amp_in_;
  Amplitude amp_out_;
  int marble_id_;
};

/// Factorized state of n non-interacting marbles (a tensor product of
/// TwoRegionMarble factors). Hits on one marble never touch the others,
/// so this representation is closed under the marble hit dynamics.
class ProductState {
 public:
  ProductState() = default;
  explicit ProductState(std::vector<TwoRegionMarble> marbles) : marbles_(std::move(marbles)) {}

  /// n marbles, each sqrt(a_sq)|in> + sqrt(1-a_sq)|out>.
  static ProductState uniform(int n, double a_sq) {
    if (n < 1) throw ValidationError("product state needs at least one marble");
    std::vector<TwoRegionMarble> ms;
    ms.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ms.push_back(TwoRegionMarble::from_in_mass(a_sq, i));
    return ProductState(std::move(ms));
  }

  const std::vector<TwoRegionMarble>& marbles() const { return marbles_; }
  int size() const { return static_cast<int>(marbles_.size()); }

  const TwoRegionMarble& marble(int i) const {
    if (i < 0 || i >= size()) throw ShapeError("unknown marble index " + std::to_string(i));
    return marbles_[static_cast<std::size_t>(i)];
  }

  ProductState with_marble(int i, TwoRegionMarble m) const {
    if (i < 0 || i >= size()) throw ShapeError("unknown marble index " + std::to_string(i));
    std::vector<TwoRegionMarble> ms = marbles_;
    ms[static_cast<std::size_t>(i)] = std::move(m);
    return ProductState(std::move(ms));
  }

  /// log of the joint squared mass of one region assignment (product of
  /// per-factor masses; exact for arbitrarily deep tails).
  double log_joint_mass(const std::vector<Region>& assignment) const {
    if (assignment.size() != marbles_.size())
      throw ShapeError("assignment must cover every marble");
    double s = 0.0;
    for (std::size_t i = 0; i < marbles_.size(); ++i)
      s += marbles_[i].log_mass(assignment[i]);
    return s;
  }

 private:
  std::vector<TwoRegionMarble> marbles_;
};

}  // namespace grwsim
