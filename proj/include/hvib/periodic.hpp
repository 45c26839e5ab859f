#pragma once

// Periodic matrix functions stored as uniform samples over one period, with
// the period-mean projector, its complement, and the zero-mean antiderivative.
// Off-grid values come from trigonometric interpolation.

#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include "hvib/matrix.hpp"

namespace hvib {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr std::size_t kDefaultGridSize = 128;
inline constexpr std::size_t kMinGridSize = 16;

class PeriodicMatrix {
 public:
  /// samples[j] is the value at tau_j = j * period / samples.size(). With
  /// `symmetric` set, samples must be symmetric to 1e-9 relative and are
  /// stored exactly symmetric.
  PeriodicMatrix(std::vector<Matrix> samples, double period = kTwoPi,
                 bool symmetric = false);

  static PeriodicMatrix constant(const Matrix& value, std::size_t grid_size,
                                 double period = kTwoPi, bool symmetric = false);
  static PeriodicMatrix sample(const std::function<Matrix(double)>& f,
                               std::size_t grid_size, double period = kTwoPi,
                               bool symmetric = false);

  double period() const noexcept { return period_; }
  std::size_t grid_size() const noexcept { return samples_.size(); }
  std::size_t rows() const noexcept { return samples_.front().rows(); }
  std::size_t cols() const noexcept { return samples_.front().cols(); }
  bool symmetric() const noexcept { return symmetric_; }

  std::span<const Matrix> samples() const noexcept { return samples_; }
  const Matrix& operator[](std::size_t j) const { return samples_[j]; }
  double node(std::size_t j) const {
    return period_ * static_cast<double>(j) / static_cast<double>(samples_.size());
  }

  /// Harmonic m (0 <= m <= grid/2) of the samples, real and imaginary parts.
  const Matrix& harmonic_re(std::size_t m) const { return coeff_re_[m]; }
  const Matrix& harmonic_im(std::size_t m) const { return coeff_im_[m]; }
  std::span<const Matrix> harmonics_re() const noexcept { return coeff_re_; }
  std::span<const Matrix> harmonics_im() const noexcept { return coeff_im_; }

  /// max_j ||F(tau_j)||_F
  double sup_norm() const;

 private:
  double period_;
  std::vector<Matrix> samples_;
  bool symmetric_;
  std::vector<Matrix> coeff_re_;
  std::vector<Matrix> coeff_im_;
};

/// Period mean of the samples (trapezoidal rule on the periodic grid).
Matrix average(const PeriodicMatrix& f);

/// F - average(F), samplewise.
PeriodicMatrix detrend(const PeriodicMatrix& f);

/// Zero-mean periodic G with G' = F. Requires average(F) ~ 0; otherwise
/// throws non_periodic_antiderivative.
PeriodicMatrix zero_mean_antiderivative(const PeriodicMatrix& f);

/// Spectral derivative (Nyquist harmonic dropped).
PeriodicMatrix spectral_derivative(const PeriodicMatrix& f);

/// Trigonometric interpolation at tau (taken modulo the period).
Matrix eval(const PeriodicMatrix& f, double tau);

/// Values at `count` uniform nodes tau_j = j * period / count.
std::vector<Matrix> sample_uniform(const PeriodicMatrix& f, std::size_t count);

/// The same function represented on a different grid.
PeriodicMatrix resample(const PeriodicMatrix& f, std::size_t grid_size);

/// Samplewise a + s * b on a shared grid.
PeriodicMatrix add_scaled(const PeriodicMatrix& a, double s,
                          const PeriodicMatrix& b);

/// max_j ||a(tau_j) - b(tau_j)||_F on a shared grid.
double sup_distance(const PeriodicMatrix& a, const PeriodicMatrix& b);

}  // namespace hvib
