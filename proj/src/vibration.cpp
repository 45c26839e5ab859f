#include "hvib/vibration.hpp"

#include <cmath>
#include <string>

#include "hvib/error.hpp"
#include "hvib/matkit.hpp"

namespace hvib {

namespace {

std::string shape(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

PeriodicMatrix combine(const PeriodicMatrix& control, const PeriodicMatrix& disturbance,
                       double gamma) {
  return add_scaled(control, -1.0 / (gamma * gamma), disturbance);
}

}  // namespace

Matrix SystemSpec::D() const {
  Matrix d = B1 * B1.transpose();
  d.add_scaled(-1.0 / (gamma * gamma), B2 * B2.transpose());
  return symmetrize(d);
}

Matrix SystemSpec::C() const { return symmetrize(L.transpose() * L); }

bool SystemSpec::has_control() const { return B1.cols() > 0 && B1.max_abs() > 0.0; }

bool SystemSpec::has_vibration() const { return K.max_abs() > 0.0; }

void SystemSpec::validate() const {
  const std::size_t dim = n();
  if (dim == 0 || !A.is_square()) fail(ErrorKind::dimension, "A must be square, got " + shape(A));
  if (dim > kMaxStateDimension) fail(ErrorKind::dimension, "state dimension above 32");
  if (B1.rows() != dim) fail(ErrorKind::dimension, "B1 must have n rows, got " + shape(B1));
  if (B2.rows() != dim) fail(ErrorKind::dimension, "B2 must have n rows, got " + shape(B2));
  if (L.cols() != dim) fail(ErrorKind::dimension, "L must have n columns, got " + shape(L));
  if (K.rows() != dim || K.cols() != dim) {
    fail(ErrorKind::dimension, "K must be n x n, got " + shape(K));
  }
  for (const Matrix* m : {&A, &B1, &B2, &L, &K}) {
    if (!m->all_finite()) fail(ErrorKind::precondition, "plant matrix has non-finite entries");
  }
  if (!(gamma > 0.0) || !std::isfinite(gamma)) fail(ErrorKind::precondition, "gamma must be positive");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    fail(ErrorKind::precondition, "epsilon must be positive");
  }
  // Vibrated plants are judged on the averaged system instead.
  if (!has_control() && !has_vibration() && !is_hurwitz(A)) {
    fail(ErrorKind::precondition,
         "B1 = 0 without vibration requires A to be Hurwitz (internal stabilizability)");
  }
}

std::string_view to_string(PhaseConvention c) {
  return c == PhaseConvention::paper ? "paper" : "zero_mean";
}

PhaseConvention parse_convention(std::string_view s) {
  if (s == "paper") return PhaseConvention::paper;
  if (s == "zero_mean") return PhaseConvention::zero_mean;
  fail(ErrorKind::config, "unknown phase convention '" + std::string(s) + "'");
}

Matrix psi(const Matrix& k, double tau, PhaseConvention convention) {
  const double phase =
      convention == PhaseConvention::paper ? std::cos(tau) - 1.0 : std::cos(tau);
  return mat_exp(k.transpose() * phase);
}

FastTimeCoefficients coefficients_at(const SystemSpec& spec, double tau,
                                     PhaseConvention convention) {
  const double phase =
      convention == PhaseConvention::paper ? std::cos(tau) - 1.0 : std::cos(tau);
  const Matrix kt = spec.K.transpose();
  FastTimeCoefficients out;
  out.psi = mat_exp(kt * phase);
  const Matrix psi_inv = mat_exp(kt * (-phase));
  const double cond = out.psi.norm1() * psi_inv.norm1();
  if (!(cond <= kPsiConditionLimit)) {
    fail(ErrorKind::transform, "Psi is ill-conditioned (cond = " + std::to_string(cond) +
                                   ") at tau = " + std::to_string(tau));
  }
  const Matrix psi_t = out.psi.transpose();
  const Matrix psi_inv_t = psi_inv.transpose();
  out.a = psi_t * spec.A * psi_inv_t;
  out.d = symmetrize(psi_t * spec.D() * out.psi);
  out.c = symmetrize(psi_inv * spec.C() * psi_inv_t);
  return out;
}

Matrix AveragedSystem::d_bar(double g) const {
  Matrix d = D_control_bar;
  d.add_scaled(-1.0 / (g * g), D_disturbance_bar);
  return symmetrize(d);
}

AveragedSystem transform_system(const SystemSpec& spec, std::size_t grid_size,
                                PhaseConvention convention) {
  spec.validate();
  std::vector<Matrix> a, c, ps, dc, dw;
  a.reserve(grid_size);
  const Matrix b1b1 = symmetrize(spec.B1 * spec.B1.transpose());
  const Matrix b2b2 = symmetrize(spec.B2 * spec.B2.transpose());
  for (std::size_t j = 0; j < grid_size; ++j) {
    const double tau = kTwoPi * static_cast<double>(j) / static_cast<double>(grid_size);
    FastTimeCoefficients co = coefficients_at(spec, tau, convention);
    const Matrix psi_t = co.psi.transpose();
    dc.push_back(symmetrize(psi_t * b1b1 * co.psi));
    dw.push_back(symmetrize(psi_t * b2b2 * co.psi));
    a.push_back(std::move(co.a));
    c.push_back(std::move(co.c));
    ps.push_back(std::move(co.psi));
  }
  PeriodicMatrix dc_per(std::move(dc), kTwoPi, true);
  PeriodicMatrix dw_per(std::move(dw), kTwoPi, true);
  PeriodicMatrix d_per = combine(dc_per, dw_per, spec.gamma);
  PeriodicMatrix a_per(std::move(a), kTwoPi, false);
  PeriodicMatrix c_per(std::move(c), kTwoPi, true);
  PeriodicMatrix psi_per(std::move(ps), kTwoPi, false);

  AveragedSystem avg{spec,
                     convention,
                     average(a_per),
                     average(d_per),
                     average(c_per),
                     average(dc_per),
                     average(dw_per),
                     std::move(a_per),
                     std::move(d_per),
                     std::move(c_per),
                     std::move(psi_per),
                     std::move(dc_per),
                     std::move(dw_per)};
  return avg;
}

AveragedSystem with_gamma(const AveragedSystem& avg, double gamma) {
  if (!(gamma > 0.0)) fail(ErrorKind::precondition, "gamma must be positive");
  AveragedSystem out = avg;
  out.spec.gamma = gamma;
  out.D_per = combine(avg.D_control_per, avg.D_disturbance_per, gamma);
  out.D_bar = average(out.D_per);
  return out;
}

AreInput averaged_are_input(const AveragedSystem& avg) {
  return AreInput{avg.A_bar, symmetrize(avg.D_bar), symmetrize(avg.C_bar)};
}

}  // namespace hvib
