#pragma once

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <vector>

#include "grwsim/amplitude.hpp"
#include "grwsim/errors.hpp"
#include "grwsim/hit_dynamics.hpp"
#include "grwsim/rng.hpp"

namespace grwsim {

/// Half-open spatial interval [lo, hi).
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return x >= lo && x < hi; }
};

/// 1D single-particle wavefunction on a periodic grid, amplitudes in
/// log-polar form so hit arithmetic stays exact arbitrarily deep into
/// the tails. Grid point i sits at origin + i*dx; the domain wraps with
/// period size()*dx.
class LatticeWavefunction {
 public:
  LatticeWavefunction(std::vector<Amplitude> amplitudes, double dx, double origin)
      : amps_(std::move(amplitudes)), dx_(dx), origin_(origin) {
    if (amps_.size() < 8) throw ValidationError("lattice grid must have at least 8 points");
    if (!(dx_ > 0.0)) throw ValidationError("grid spacing dx must be > 0");
  }

  /// Normalized Gaussian packet: |psi|^2 has standard deviation sigma_psi.
  static LatticeWavefunction gaussian(std::size_t points, double dx, double origin,
                                      double mean, double sigma_psi) {
    std::vector<Amplitude> amps(points);
    for (std::size_t i = 0; i < points; ++i) {
      const double x = origin + static_cast<double>(i) * dx;
      amps[i] = Amplitude::from_log_polar(
          -(x - mean) * (x - mean) / (4.0 * sigma_psi * sigma_psi), 0.0);
    }
    return LatticeWavefunction(std::move(amps), dx, origin).normalized();
  }

  /// sqrt(w1)*bump1 + sqrt(w2)*bump2, then normalized.
  static LatticeWavefunction two_bump(std::size_t points, double dx, double origin,
                                      double mean1, double sigma1, double w1,
                                      double mean2, double sigma2, double w2) {
    std::vector<Amplitude> amps(points);
    for (std::size_t i = 0; i < points; ++i) {
      const double x = origin + static_cast<double>(i) * dx;
      const Amplitude b1 = Amplitude::from_log_polar(
          0.5 * std::log(w1) - (x - mean1) * (x - mean1) / (4.0 * sigma1 * sigma1), 0.0);
      const Amplitude b2 = Amplitude::from_log_polar(
          0.5 * std::log(w2) - (x - mean2) * (x - mean2) / (4.0 * sigma2 * sigma2), 0.0);
      amps[i] = b1 + b2;
    }
    return LatticeWavefunction(std::move(amps), dx, origin).normalized();
  }

  static LatticeWavefunction uniform(std::size_t points, double dx, double origin) {
    std::vector<Amplitude> amps(points, Amplitude::one());
    return LatticeWavefunction(std::move(amps), dx, origin).normalized();
  }

  const std::vector<Amplitude>& amplitudes() const { return amps_; }
  std::size_t size() const { return amps_.size(); }
  double dx() const { return dx_; }
  double origin() const { return origin_; }
  double domain_length() const { return static_cast<double>(amps_.size()) * dx_; }
  double x_at(std::size_t i) const { return origin_ + static_cast<double>(i) * dx_; }

  double log_total_mass() const {
    LogMassAccumulator acc;
    for (const auto& a : amps_) acc.add_log(a.log_squared_magnitude());
    return acc.log_total() + std::log(dx_);
  }

  double total_mass() const { return std::exp(log_total_mass()); }

  LatticeWavefunction normalized() const {
    const double lm = log_total_mass();
    if (std::isinf(lm) && lm < 0)
      throw DegenerateStateError("cannot normalize an all-zero wavefunction");
    std::vector<Amplitude> amps = amps_;
    for (auto& a : amps) a = a.scaled_mag(-0.5 * lm);
    return LatticeWavefunction(std::move(amps), dx_, origin_);
  }

  /// Integral of |psi|^2 over [interval.lo, interval.hi).
  double region_mass(const Interval& interval) const {
    LogMassAccumulator acc;
    for (std::size_t i = 0; i < amps_.size(); ++i)
      if (interval.contains(x_at(i))) acc.add_log(amps_[i].log_squared_magnitude());
    if (acc.empty()) return 0.0;
    return std::exp(acc.log_total() + std::log(dx_));
  }

  /// Probability weights |psi_i|^2 dx as plain doubles (max-rescaled
  /// internally, then normalized to sum to the true total mass).
  std::vector<double> density() const {
    double shift = -std::numeric_limits<double>::infinity();
    for (const auto& a : amps_) shift = std::max(shift, a.log_squared_magnitude());
    std::vector<double> w(amps_.size(), 0.0);
    if (std::isinf(shift)) return w;
    double sum = 0.0;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
      w[i] = std::exp(amps_[i].log_squared_magnitude() - shift);
      sum += w[i];
    }
    const double total = total_mass();
    for (double& x : w) x = x / (sum * dx_) * total;  // |psi_i|^2
    return w;
  }

  double mean_position() const {
    const std::vector<double> d = density();
    double m = 0.0, tot = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      m += x_at(i) * d[i];
      tot += d[i];
    }
    return m / tot;
  }

  double position_variance() const {
    const std::vector<double> d = density();
    const double mu = mean_position();
    double v = 0.0, tot = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      v += (x_at(i) - mu) * (x_at(i) - mu) * d[i];
      tot += d[i];
    }
    return v / tot;
  }

  /// <(hbar k)^2> - <hbar k>^2 over the spectral representation.
  /// Goes through complex doubles, so it needs representable amplitudes.
  double momentum_variance(double hbar = 1.0) const {
    std::vector<std::complex<double>> v = to_complex_shifted();
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> vk;
    fft.fwd(vk, v);
    const double L = domain_length();
    const std::size_t n = vk.size();
    double w = 0.0, m1 = 0.0, m2 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double jj = j <= n / 2 ? static_cast<double>(j)
                                   : static_cast<double>(j) - static_cast<double>(n);
      const double k = 2.0 * Amplitude::pi() * jj / L;
      const double p = std::norm(vk[j]);
      w += p;
      m1 += p * hbar * k;
      m2 += p * hbar * k * hbar * k;
    }
    m1 /= w;
    m2 /= w;
    return m2 - m1 * m1;
  }

  std::vector<std::complex<double>> to_complex_shifted() const {
    double shift = -std::numeric_limits<double>::infinity();
    for (const auto& a : amps_) shift = std::max(shift, a.log_magnitude());
    std::vector<std::complex<double>> v(amps_.size());
    for (std::size_t i = 0; i < amps_.size(); ++i) v[i] = amps_[i].to_complex_shifted(shift);
    return v;
  }

  /// Minimal-image displacement on the periodic domain.
  double min_image(double y) const {
    const double L = domain_length();
    y -= L * std::round(y / L);
    return y;
  }

 private:
  std::vector<Amplitude> amps_;
  double dx_;
  double origin_;
};

/// log of the jump factor j(y): a Gaussian normalized in squared
/// integral, with |j|^2 the N(0, sigma^2) density.
inline double log_jump_factor(double y, double sigma) {
  return -0.25 * std::log(2.0 * Amplitude::pi() * sigma * sigma) -
         y * y / (4.0 * sigma * sigma);
}

/// Collapse of psi under a hit at `center`: psi'(x) = j(center - x) psi(x) / R.
/// Worked entirely in the log domain, so hits centered arbitrarily far
/// into the tails renormalize exactly instead of dividing by zero.
inline LatticeWavefunction apply_lattice_hit(const LatticeWavefunction& psi, double center,
                                             const GrwParams& params) {
  if (center < psi.origin() || center >= psi.origin() + psi.domain_length())
    throw ValidationError("hit center lies outside the grid extent");
  const double sigma = params.effective_sigma();
  std::vector<Amplitude> amps = psi.amplitudes();
  LogMassAccumulator norm;
  for (std::size_t i = 0; i < amps.size(); ++i) {
    const double y = psi.min_image(center - psi.x_at(i));
    amps[i] = amps[i].scaled_mag(log_jump_factor(y, sigma));
    norm.add_log(amps[i].log_squared_magnitude());
  }
  if (norm.empty()) throw DegenerateHitError("hit renormalization factor is zero");
  const double half = 0.5 * (norm.log_total() + std::log(psi.dx()));
  for (auto& a : amps) a = a.scaled_mag(-half);
  return LatticeWavefunction(std::move(amps), psi.dx(), psi.origin());
}

/// Hit-center density |R(x)|^2 on the grid: the circular convolution of
/// |psi|^2 with |j|^2. Integrates to 1 up to grid discretization of the
/// Gaussian kernel.
inline std::vector<double> hit_center_density(const LatticeWavefunction& psi,
                                              const GrwParams& params) {
  const std::size_t n = psi.size();
  const double sigma = params.effective_sigma();
  // |j|^2 sampled over circular offsets, once; renormalized over the grid
  // so the density integrates to 1 even when sigma is under-resolved
  std::vector<double> kernel(n);
  const double c = 1.0 / std::sqrt(2.0 * Amplitude::pi() * sigma * sigma);
  double ksum = 0.0;
  for (std::size_t d = 0; d < n; ++d) {
    const double y = psi.min_image(static_cast<double>(d) * psi.dx());
    kernel[d] = c * std::exp(-y * y / (2.0 * sigma * sigma));
    ksum += kernel[d] * psi.dx();
  }
  for (double& k : kernel) k /= ksum;
  // relative weights of |psi|^2 dx
  double shift = -std::numeric_limits<double>::infinity();
  for (const auto& a : psi.amplitudes()) shift = std::max(shift, a.log_squared_magnitude());
  std::vector<double> w(n, 0.0);
  double wsum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = std::exp(psi.amplitudes()[i].log_squared_magnitude() - shift);
    wsum += w[i];
  }
  std::vector<double> density(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    if (w[r] == 0.0) continue;
    const double wr = w[r] / wsum;
    for (std::size_t k = 0; k < n; ++k)
      density[k] += kernel[(k + n - r) % n] * wr;
  }
  return density;
}

/// Precomputed inverse-CDF sampler over the hit-center density; build it
/// once when drawing many centers from the same state.
class HitCenterSampler {
 public:
  HitCenterSampler(const LatticeWavefunction& psi, const GrwParams& params)
      : dx_(psi.dx()), origin_(psi.origin()) {
    const std::vector<double> density = hit_center_density(psi, params);
    cdf_.resize(density.size());
    double cum = 0.0;
    for (std::size_t i = 0; i < density.size(); ++i) {
      cum += density[i] * dx_;
      cdf_[i] = cum;
    }
    for (double& c : cdf_) c /= cum;
  }

  double sample(Rng& rng) const {
    const double u = rng.uniform();
    std::size_t lo = 0, hi = cdf_.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (cdf_[mid] <= u)
        lo = mid + 1;
      else
        hi = mid;
    }
    const double below = lo == 0 ? 0.0 : cdf_[lo - 1];
    const double frac = (u - below) / (cdf_[lo] - below);
    return origin_ + (static_cast<double>(lo) + frac) * dx_;
  }

  /// Piecewise-linear CDF at x (cell i spans [x_i, x_i + dx)).
  double cdf(double x) const {
    const double pos = (x - origin_) / dx_;
    if (pos <= 0.0) return 0.0;
    if (pos >= static_cast<double>(cdf_.size())) return 1.0;
    const auto i = static_cast<std::size_t>(pos);
    const double below = i == 0 ? 0.0 : cdf_[i - 1];
    return below + (cdf_[i] - below) * (pos - static_cast<double>(i));
  }

 private:
  std::vector<double> cdf_;
  double dx_;
  double origin_;
};

/// One draw from the hit-center distribution (inverse CDF on the grid).
inline double sample_hit_center(const LatticeWavefunction& psi, Rng& rng,
                                const GrwParams& params) {
  return HitCenterSampler(psi, params).sample(rng);
}

/// Free-particle spectral step: psi_k *= exp(-i hbar k^2 dt / 2m) on the
/// periodic grid. dt = 0 returns the input bit-for-bit.
inline LatticeWavefunction free_evolve(const LatticeWavefunction& psi, double dt,
                                       double mass, double hbar = 1.0) {
  if (dt < 0.0) throw ValidationError("free evolution requires dt >= 0");
  if (!(mass > 0.0)) throw ValidationError("mass must be > 0");
  if (dt == 0.0) return psi;
  double shift = -std::numeric_limits<double>::infinity();
  for (const auto& a : psi.amplitudes()) shift = std::max(shift, a.log_magnitude());
  std::vector<std::complex<double>> v(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i)
    v[i] = psi.amplitudes()[i].to_complex_shifted(shift);
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> vk;
  fft.fwd(vk, v);
  const double L = psi.domain_length();
  const std::size_t n = vk.size();
  for (std::size_t j = 0; j < n; ++j) {
    const double jj = j <= n / 2 ? static_cast<double>(j)
                                 : static_cast<double>(j) - static_cast<double>(n);
    const double k = 2.0 * Amplitude::pi() * jj / L;
    vk[j] *= std::exp(std::complex<double>(0.0, -hbar * k * k * dt / (2.0 * mass)));
  }
  fft.inv(v, vk);
  std::vector<Amplitude> amps(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double m = std::abs(v[i]);
    amps[i] = m == 0.0 ? Amplitude::zero()
                       : Amplitude::from_log_polar(shift + std::log(m), std::arg(v[i]));
  }
  return LatticeWavefunction(std::move(amps), psi.dx(), psi.origin());
}

}  // namespace grwsim
