#pragma once

// Independent verification of the series: a shooting reference for the
// periodic Riccati solution, ODE defects, Floquet stability of the closed
// loop, time-domain simulation of the game functional, and measured
// convergence orders over a dyadic epsilon grid.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hvib/expansion.hpp"
#include "hvib/hinf.hpp"
#include "hvib/matrix.hpp"
#include "hvib/periodic.hpp"
#include "hvib/vibration.hpp"

namespace hvib {

inline constexpr std::size_t kDefaultRk4Steps = 4096;
inline constexpr double kFloquetStabilityMargin = 1e-9;

/// Transformed coefficients tabulated at the RK4 stage points
/// tau = j * h / 2, j = 0 .. 2 * steps, computed directly from Psi.
class CoefficientTable {
 public:
  CoefficientTable(const AveragedSystem& avg, std::size_t steps);

  std::size_t steps() const noexcept { return steps_; }
  double step() const noexcept { return kTwoPi / static_cast<double>(steps_); }
  const FastTimeCoefficients& at_half_step(std::size_t j) const { return table_[j]; }

 private:
  std::size_t steps_;
  std::vector<FastTimeCoefficients> table_;
};

/// dP/dtau = eps (-A^T P - P A + P D P - C) at one set of coefficients.
Matrix riccati_rhs(const FastTimeCoefficients& co, const Matrix& p, double eps);

struct ShootingOptions {
  std::size_t steps = kDefaultRk4Steps;
  int max_newton = 50;
};

struct ReferenceSolution {
  PeriodicMatrix P;  // on the grid of the averaged system
  Matrix P0;
  int newton_iterations = 0;
  double closure_residual = 0.0;  // ||P(2 pi) - P(0)|| from the converged start
  double floquet_radius = 0.0;
};

/// Periodic solution of the fast-time Riccati ODE by single shooting: RK4 over
/// one period, Newton on P(2 pi) - P(0) = 0 with a finite-difference Jacobian
/// over the n(n+1)/2 free entries. Throws no_reference if Newton fails,
/// divergence on blow-up, and no_reference if the orbit is not stabilizing.
ReferenceSolution reference_solution(const AveragedSystem& avg, double eps,
                                     const Matrix& init, const ShootingOptions& options = {});

/// One period of the Riccati flow from P0; optionally records grid samples.
Matrix riccati_flow(const CoefficientTable& table, const Matrix& p0, double eps,
                    std::vector<Matrix>* samples = nullptr, std::size_t grid = 0);

/// sup over the grid of || dP_(N)/dtau - eps F(tau, P_(N)) ||.
double defect(const ExpansionSeries& series, double eps);

enum class FloquetForm {
  original,     // dx/dtau = [eps A + sin(tau) K - eps D R(tau)] x, R = Psi P Psi^T
  transformed,  // dy/dtau = eps [A(tau) - D(tau) P(tau)] y
};

struct FloquetResult {
  Matrix monodromy;
  double radius = 0.0;
  bool stable = false;  // radius < 1 - 1e-9
};

/// Monodromy of the closed loop over one fast period. `p` is the periodic
/// Riccati solution in the transformed coordinates (it equals R when K = 0).
FloquetResult floquet(const SystemSpec& spec, const PeriodicMatrix& p, double eps,
                      FloquetForm form, PhaseConvention convention = PhaseConvention::paper,
                      std::size_t steps = kDefaultRk4Steps);

// --- time-domain simulation -------------------------------------------------

/// Riccati solution in original coordinates as a function of slow time t.
using RiccatiSource = std::function<Matrix(double t)>;

RiccatiSource constant_riccati(const Matrix& r);
RiccatiSource series_riccati(const ExpansionSeries& series, double eps);

enum class ControlMode { open_loop, saddle };

struct Disturbance {
  enum class Kind { zero, bump, noise, worst_case };
  Kind kind = Kind::zero;
  double amplitude = 1.0;
  /// Support of the bump / noise window; for worst_case, length of the
  /// initial bump before the w* = Kw x feedback takes over.
  double duration = 1.0;
  double cutoff = 2.0;  // rad/s
  std::size_t harmonics = 16;
  std::uint64_t seed = 0;
};

std::string to_string(Disturbance::Kind kind);
Disturbance::Kind parse_disturbance_kind(const std::string& s);

struct SimulationResult {
  std::vector<double> time;
  std::vector<std::vector<double>> state;
  std::vector<std::vector<double>> z;
  std::vector<std::vector<double>> u;
  std::vector<std::vector<double>> w;
  double J_value = 0.0;  // ||z||^2 + ||u||^2 - gamma^2 ||w||^2 over the horizon
  double z_energy = 0.0;
  double u_energy = 0.0;
  double w_energy = 0.0;
  double gain_estimate = 0.0;  // ||z|| / ||w||
  /// J - [ ||u - u*||^2 - gamma^2 ||w - w*||^2 - x(T)^T R(T) x(T) ]; zero for
  /// an exact Riccati solution. NaN without a Riccati source.
  double saddle_residual = 0.0;
  double horizon = 0.0;
  double step = 0.0;
};

struct SimulationOptions {
  double horizon = 0.0;  // 0 selects 40 / |max Re spec(closed loop)|
  double step = 1e-2;
};

/// RK4 integration of the vibrated plant from x(0) = 0 with u = -Ku x
/// (saddle) or u = 0, and w from `disturbance`. Throws divergence on blow-up.
SimulationResult simulate(const SystemSpec& spec, ControlMode mode,
                          const std::optional<RiccatiSource>& riccati,
                          const Disturbance& disturbance, const SimulationOptions& options);

/// 40 / |max Re| of A - D R (the w*-closed loop), used as default horizon.
double default_horizon(const SystemSpec& spec, const Matrix& r);

// --- convergence / certification --------------------------------------------

struct EpsilonRecord {
  double epsilon = 0.0;
  bool reference_ok = false;
  std::string failure;
  double defect_sup = 0.0;
  double series_error_sup = 0.0;
  double floquet_radius = 0.0;
  bool positive_definite_ok = false;
  int newton_iterations = 0;
};

struct VerificationReport {
  std::size_t order = 0;
  std::vector<EpsilonRecord> records;  // epsilon strictly decreasing
  std::vector<double> defect_slopes;   // log2 ratios between consecutive entries
  std::vector<double> error_slopes;
  double defect_order = 0.0;  // least-squares slope of log defect vs log eps
  double error_order = 0.0;
  bool exact_regime = false;  // all errors at the numerical floor; orders NaN
  std::optional<double> epsilon_star;
  bool certified = false;
};

inline const std::vector<double>& default_epsilon_sweep() {
  static const std::vector<double> sweep = {0.2, 0.1, 0.05, 0.025, 0.0125};
  return sweep;
}

struct VerifyOptions {
  ShootingOptions shooting;
  /// Propagate reference failures instead of recording them.
  bool strict = false;
};

/// Per-epsilon reference, defect, error, Floquet radius and definiteness for
/// the order-N series, plus fitted orders.
VerificationReport verify(const AveragedSystem& avg, std::span<const double> eps_list,
                          std::size_t order, const VerifyOptions& options = {});

/// Strict variant: requires at least three dyadic epsilons, all of which must
/// produce a reference solution.
VerificationReport convergence_order(const AveragedSystem& avg,
                                     std::span<const double> eps_list, std::size_t order,
                                     const ShootingOptions& shooting = {});

}  // namespace hvib
