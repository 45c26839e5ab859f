#pragma once

// Asymptotic series for the periodic stabilizing Riccati solution in the
// fast-time P coordinates:
//
//   P_(N)(tau) = R_0 + sum_{k=1..N} eps^k (R_k + Pi_k(tau)) + eps^{N+1} Pi_{N+1}(tau)
//
// R_0 solves the averaged ARE; each R_k (k >= 1) solves a Lyapunov equation on
// the averaged closed loop A_bar - D_bar R_0; each Pi_k is the zero-mean
// antiderivative of the detrended order-(k-1) bracket.

#include <cstddef>
#include <string_view>
#include <vector>

#include "hvib/matrix.hpp"
#include "hvib/periodic.hpp"
#include "hvib/riccati.hpp"
#include "hvib/vibration.hpp"

namespace hvib {

inline constexpr std::size_t kMaxSeriesOrder = 8;

struct ExpansionSeries {
  std::size_t order = 0;
  std::vector<Matrix> constants;          // R_0 .. R_N
  std::vector<PeriodicMatrix> periodics;  // Pi_1 .. Pi_{N+1}
  Matrix closed_loop_avg;                 // A_bar - D_bar R_0
  StabilizingSolution r0_certificate;
  AveragedSystem source;
};

/// Throws precondition if the averaged ARE has no positive definite
/// stabilizing solution or if order > kMaxSeriesOrder.
ExpansionSeries build_series(const AveragedSystem& avg, std::size_t order);

/// Full order-k bracket on the grid,
///   F_k = -A^T S_k - S_k A + sum_{i+j=k} S_i D S_j - [k == 0] C,
/// with S_0 = R_0, S_j = R_j + Pi_j (1 <= j <= N), S_{N+1} = Pi_{N+1}.
PeriodicMatrix order_bracket(const ExpansionSeries& series, std::size_t k);

enum class Coordinates { fast_P, original_R };

std::string_view to_string(Coordinates c);

/// P_(N)(t/eps) or Psi(t/eps) P_(N)(t/eps) Psi^T(t/eps), symmetrized.
Matrix eval_series(const ExpansionSeries& series, double eps, double t,
                   Coordinates coordinates);

/// P_(N) sampled on the series grid (fast time, tau_j = 2 pi j / grid).
PeriodicMatrix series_on_grid(const ExpansionSeries& series, double eps);

/// Psi(tau_j) P(tau_j) Psi^T(tau_j) on the grid of P.
PeriodicMatrix to_original(const PeriodicMatrix& p, const SystemSpec& spec,
                           PhaseConvention convention);

}  // namespace hvib
