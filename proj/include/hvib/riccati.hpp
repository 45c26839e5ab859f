#pragma once

// Stabilizing solutions of
//   -A^T R - R A + R D R - C = 0,   A - D R Hurwitz,
// where D may be indefinite (D = B1 B1^T - gamma^-2 B2 B2^T), plus the
// Lyapunov solves used by the expansion recursion.

#include <optional>
#include <string>

#include "hvib/matkit.hpp"
#include "hvib/matrix.hpp"

namespace hvib {

/// Hamiltonian eigenvalues with |Re| below this (times max(1, ||H||)) count
/// as lying on the imaginary axis.
inline constexpr double kImaginaryAxisMargin = 1e-8;

struct StabilizingSolution {
  Matrix R;
  Matrix closed_loop;  // A - D R
  double residual_norm = 0.0;
  double stability_margin = 0.0;  // -max Re spec(A - D R)
  int newton_steps = 0;
};

/// Residual -A^T R - R A + R D R - C, symmetrized.
Matrix are_residual(const Matrix& a, const Matrix& d, const Matrix& c,
                    const Matrix& r);

/// Residual scale used by the acceptance tolerance:
/// max(1, ||A|| + ||D|| + ||C||).
double are_scale(const Matrix& a, const Matrix& d, const Matrix& c);

/// Hamiltonian [[A, -D], [-C, -A^T]].
Matrix hamiltonian(const Matrix& a, const Matrix& d, const Matrix& c);

/// Stable invariant subspace of the Hamiltonian (eigenvectors by inverse
/// iteration), R = X2 X1^-1, then Newton refinement where each step is one
/// Lyapunov solve on the current closed loop. Throws infeasible when the
/// Hamiltonian has eigenvalues on the imaginary axis or X1 is singular, and
/// numerical_failure when Newton stagnates above tolerance.
StabilizingSolution solve_stabilizing_are(const Matrix& a, const Matrix& d,
                                          const Matrix& c);

/// R with Acl^T R + R Acl + W = 0. Acl must be Hurwitz.
Matrix solve_lyapunov(const Matrix& acl, const Matrix& w);

struct FeasibilityResult {
  bool feasible = false;
  std::optional<StabilizingSolution> certificate;
  std::optional<Definiteness> definiteness;
  std::string reason;
};

/// Feasible iff a stabilizing solution exists and it is positive definite.
/// Never throws for numerical reasons; failures come back as a reason.
FeasibilityResult is_feasible(const Matrix& a, const Matrix& d, const Matrix& c);

}  // namespace hvib
