#include "hvib/periodic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hvib/error.hpp"
#include "hvib/matkit.hpp"

namespace hvib {

namespace {

void require_same_grid(const PeriodicMatrix& a, const PeriodicMatrix& b) {
  if (a.grid_size() != b.grid_size() || a.rows() != b.rows() ||
      a.cols() != b.cols() || a.period() != b.period()) {
    fail(ErrorKind::dimension, "periodic matrices live on different grids");
  }
}

// Real synthesis from the half spectrum: c0 + 2 sum Re(c_m e^{i m w t}) +
// c_{G/2} cos(G/2 w t).
Matrix synthesize(std::span<const Matrix> re, std::span<const Matrix> im,
                  double omega_tau, std::size_t grid) {
  const std::size_t half = grid / 2;
  Matrix out = re[0];
  for (std::size_t m = 1; m < half; ++m) {
    const double angle = static_cast<double>(m) * omega_tau;
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    out.add_scaled(2.0 * c, re[m]).add_scaled(-2.0 * s, im[m]);
  }
  out.add_scaled(std::cos(static_cast<double>(half) * omega_tau), re[half]);
  return out;
}

std::vector<Matrix> synthesize_on_grid(const std::vector<Matrix>& re,
                                       const std::vector<Matrix>& im,
                                       std::size_t grid) {
  std::vector<Matrix> out;
  out.reserve(grid);
  for (std::size_t j = 0; j < grid; ++j) {
    out.push_back(synthesize(re, im,
                             kTwoPi * static_cast<double>(j) / static_cast<double>(grid),
                             grid));
  }
  return out;
}

}  // namespace

PeriodicMatrix::PeriodicMatrix(std::vector<Matrix> samples, double period,
                               bool symmetric)
    : period_(period), samples_(std::move(samples)), symmetric_(symmetric) {
  const std::size_t grid = samples_.size();
  if (grid < kMinGridSize || grid % 2 != 0) {
    fail(ErrorKind::precondition, "periodic grid size must be even and >= 16, got " +
                                      std::to_string(grid));
  }
  if (!(period_ > 0.0) || !std::isfinite(period_)) {
    fail(ErrorKind::precondition, "period must be positive");
  }
  for (const Matrix& s : samples_) {
    if (s.rows() != samples_.front().rows() || s.cols() != samples_.front().cols()) {
      fail(ErrorKind::dimension, "periodic samples differ in shape");
    }
    if (!s.all_finite()) fail(ErrorKind::numerical_failure, "non-finite periodic sample");
  }
  if (symmetric_) {
    for (Matrix& s : samples_) s = enforce_symmetric(s, "periodic sample");
  }

  const std::size_t half = grid / 2;
  coeff_re_.assign(half + 1, Matrix(rows(), cols()));
  coeff_im_.assign(half + 1, Matrix(rows(), cols()));
  std::vector<double> cs(grid), sn(grid);
  for (std::size_t j = 0; j < grid; ++j) {
    const double angle = kTwoPi * static_cast<double>(j) / static_cast<double>(grid);
    cs[j] = std::cos(angle);
    sn[j] = std::sin(angle);
  }
  const double inv = 1.0 / static_cast<double>(grid);
  for (std::size_t m = 0; m <= half; ++m) {
    Matrix& re = coeff_re_[m];
    Matrix& im = coeff_im_[m];
    for (std::size_t j = 0; j < grid; ++j) {
      const std::size_t idx = (m * j) % grid;
      re.add_scaled(cs[idx] * inv, samples_[j]);
      im.add_scaled(-sn[idx] * inv, samples_[j]);
    }
  }
}

PeriodicMatrix PeriodicMatrix::constant(const Matrix& value, std::size_t grid_size,
                                        double period, bool symmetric) {
  return PeriodicMatrix(std::vector<Matrix>(grid_size, value), period, symmetric);
}

PeriodicMatrix PeriodicMatrix::sample(const std::function<Matrix(double)>& f,
                                      std::size_t grid_size, double period,
                                      bool symmetric) {
  std::vector<Matrix> s;
  s.reserve(grid_size);
  for (std::size_t j = 0; j < grid_size; ++j) {
    s.push_back(f(period * static_cast<double>(j) / static_cast<double>(grid_size)));
  }
  return PeriodicMatrix(std::move(s), period, symmetric);
}

double PeriodicMatrix::sup_norm() const {
  double m = 0.0;
  for (const Matrix& s : samples_) m = std::max(m, s.norm());
  return m;
}

Matrix average(const PeriodicMatrix& f) {
  // Accumulate deviations from the first sample so a constant function
  // averages to itself exactly.
  const auto s = f.samples();
  Matrix dev(f.rows(), f.cols());
  for (std::size_t j = 1; j < s.size(); ++j) {
    dev += s[j];
    dev -= s[0];
  }
  Matrix mean = s[0];
  mean.add_scaled(1.0 / static_cast<double>(s.size()), dev);
  if (f.symmetric()) mean = symmetrize(mean);
  return mean;
}

PeriodicMatrix detrend(const PeriodicMatrix& f) {
  const Matrix mean = average(f);
  std::vector<Matrix> out;
  out.reserve(f.grid_size());
  for (const Matrix& s : f.samples()) out.push_back(s - mean);
  return PeriodicMatrix(std::move(out), f.period(), f.symmetric());
}

PeriodicMatrix zero_mean_antiderivative(const PeriodicMatrix& f) {
  const double mean_norm = average(f).norm();
  if (mean_norm > 1e-10 * f.sup_norm()) {
    fail(ErrorKind::non_periodic_antiderivative,
         "antiderivative of a function with nonzero mean is not periodic (|mean| = " +
             std::to_string(mean_norm) + ")");
  }
  const std::size_t grid = f.grid_size();
  const std::size_t half = grid / 2;
  const double omega = kTwoPi / f.period();
  std::vector<Matrix> re(half + 1, Matrix(f.rows(), f.cols()));
  std::vector<Matrix> im(half + 1, Matrix(f.rows(), f.cols()));
  // c_m / (i m w) = (im - i re) / (m w)
  for (std::size_t m = 1; m < half; ++m) {
    const double k = 1.0 / (static_cast<double>(m) * omega);
    re[m] = f.harmonic_im(m) * k;
    im[m] = f.harmonic_re(m) * (-k);
  }
  return PeriodicMatrix(synthesize_on_grid(re, im, grid), f.period(), f.symmetric());
}

PeriodicMatrix spectral_derivative(const PeriodicMatrix& f) {
  const std::size_t grid = f.grid_size();
  const std::size_t half = grid / 2;
  const double omega = kTwoPi / f.period();
  std::vector<Matrix> re(half + 1, Matrix(f.rows(), f.cols()));
  std::vector<Matrix> im(half + 1, Matrix(f.rows(), f.cols()));
  // i m w c_m
  for (std::size_t m = 1; m < half; ++m) {
    const double k = static_cast<double>(m) * omega;
    re[m] = f.harmonic_im(m) * (-k);
    im[m] = f.harmonic_re(m) * k;
  }
  return PeriodicMatrix(synthesize_on_grid(re, im, grid), f.period(), f.symmetric());
}

Matrix eval(const PeriodicMatrix& f, double tau) {
  const double omega = kTwoPi / f.period();
  double phase = std::fmod(tau, f.period());
  if (phase < 0.0) phase += f.period();
  Matrix out = synthesize(f.harmonics_re(), f.harmonics_im(), omega * phase,
                          f.grid_size());
  return f.symmetric() ? symmetrize(out) : out;
}

std::vector<Matrix> sample_uniform(const PeriodicMatrix& f, std::size_t count) {
  std::vector<Matrix> out;
  out.reserve(count);
  for (std::size_t j = 0; j < count; ++j) {
    const double phase = kTwoPi * static_cast<double>(j) / static_cast<double>(count);
    Matrix v = synthesize(f.harmonics_re(), f.harmonics_im(), phase, f.grid_size());
    out.push_back(f.symmetric() ? symmetrize(v) : std::move(v));
  }
  return out;
}

PeriodicMatrix resample(const PeriodicMatrix& f, std::size_t grid_size) {
  return PeriodicMatrix(sample_uniform(f, grid_size), f.period(), f.symmetric());
}

PeriodicMatrix add_scaled(const PeriodicMatrix& a, double s,
                          const PeriodicMatrix& b) {
  require_same_grid(a, b);
  std::vector<Matrix> out;
  out.reserve(a.grid_size());
  for (std::size_t j = 0; j < a.grid_size(); ++j) {
    Matrix v = a[j];
    v.add_scaled(s, b[j]);
    out.push_back(std::move(v));
  }
  return PeriodicMatrix(std::move(out), a.period(), a.symmetric() && b.symmetric());
}

double sup_distance(const PeriodicMatrix& a, const PeriodicMatrix& b) {
  require_same_grid(a, b);
  double m = 0.0;
  for (std::size_t j = 0; j < a.grid_size(); ++j) m = std::max(m, (a[j] - b[j]).norm());
  return m;
}

}  // namespace hvib
