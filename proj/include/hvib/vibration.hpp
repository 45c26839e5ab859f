#pragma once

// Plant description and the fast-time change of variables R = Psi P Psi^T that
// removes the O(1/eps) vibration term, followed by averaging over one period.

#include <cstddef>
#include <string_view>

#include "hvib/matrix.hpp"
#include "hvib/periodic.hpp"

namespace hvib {

/// x' = (A + (1/eps) sin(t/eps) K) x + B1 u + B2 w,  z = L x.
struct SystemSpec {
  Matrix A;   // n x n
  Matrix B1;  // n x p (p may be 0)
  Matrix B2;  // n x q
  Matrix L;   // m x n
  Matrix K;   // n x n
  double gamma = 1.0;
  double epsilon = 0.1;

  std::size_t n() const noexcept { return A.rows(); }

  /// B1 B1^T - gamma^-2 B2 B2^T
  Matrix D() const;
  /// L^T L
  Matrix C() const;
  bool has_control() const;
  bool has_vibration() const;

  /// Throws dimension / precondition errors for malformed plants.
  void validate() const;
};

/// paper: Psi(tau) = exp(K^T (cos tau - 1)), so Psi(0) = I.
/// zero_mean: Psi(tau) = exp(K^T cos tau).
enum class PhaseConvention { paper, zero_mean };

std::string_view to_string(PhaseConvention c);
PhaseConvention parse_convention(std::string_view s);

Matrix psi(const Matrix& k, double tau, PhaseConvention convention);

/// Transformed coefficients at one fast-time instant.
struct FastTimeCoefficients {
  Matrix a;  // Psi^T A Psi^-T
  Matrix d;  // Psi^T D Psi
  Matrix c;  // Psi^-1 C Psi^-T
  Matrix psi;
};

/// Throws transform if cond(Psi) exceeds 1e12.
FastTimeCoefficients coefficients_at(const SystemSpec& spec, double tau,
                                     PhaseConvention convention);

inline constexpr double kPsiConditionLimit = 1e12;

struct AveragedSystem {
  SystemSpec spec;
  PhaseConvention convention = PhaseConvention::paper;

  Matrix A_bar;
  Matrix D_bar;
  Matrix C_bar;
  // D_bar(gamma) = D_control_bar - gamma^-2 D_disturbance_bar
  Matrix D_control_bar;
  Matrix D_disturbance_bar;

  PeriodicMatrix A_per;
  PeriodicMatrix D_per;
  PeriodicMatrix C_per;
  PeriodicMatrix psi_per;
  PeriodicMatrix D_control_per;
  PeriodicMatrix D_disturbance_per;

  std::size_t grid_size() const noexcept { return A_per.grid_size(); }
  double gamma() const noexcept { return spec.gamma; }
  Matrix d_bar(double gamma) const;
};

AveragedSystem transform_system(const SystemSpec& spec,
                                std::size_t grid_size = kDefaultGridSize,
                                PhaseConvention convention = PhaseConvention::paper);

/// Same transform at a different attenuation level; only the D terms change.
AveragedSystem with_gamma(const AveragedSystem& avg, double gamma);

struct AreInput {
  Matrix A;
  Matrix D;
  Matrix C;
};

AreInput averaged_are_input(const AveragedSystem& avg);

}  // namespace hvib
