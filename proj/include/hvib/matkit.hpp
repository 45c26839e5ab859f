#pragma once

// Dense kernels for the small systems handled here (n <= 32): matrix
// exponential, eigenvalues, Sylvester/Lyapunov solves and definiteness.

#include <complex>
#include <cstddef>
#include <vector>

#include "hvib/matrix.hpp"

namespace hvib {

inline constexpr std::size_t kMaxStateDimension = 32;
inline constexpr double kDefaultHurwitzMargin = 1e-7;
inline constexpr double kSymmetryTolerance = 1e-9;

using Complex = std::complex<double>;

struct SpectrumReport {
  /// Sorted by ascending real part, then ascending imaginary part.
  std::vector<Complex> eigenvalues;
  double max_real_part = 0.0;
  double spectral_radius = 0.0;
};

enum class Definiteness { positive_definite, positive_semidefinite, indefinite };

const char* to_string(Definiteness d);

/// e^M by scaling and squaring with the degree-13 diagonal Pade approximant.
Matrix mat_exp(const Matrix& m);

/// Balancing, Householder reduction to Hessenberg form, Francis double-shift
/// QR. Throws numerical_failure if the iteration does not converge.
SpectrumReport eigenvalues(const Matrix& m);

/// True iff every eigenvalue has real part < -margin.
bool is_hurwitz(const Matrix& m, double margin = kDefaultHurwitzMargin);

/// Unit-norm vector v with (M - lambda I) v ~ 0, by inverse iteration started
/// from `start` (complex arithmetic, partial pivoting).
std::vector<Complex> eigenvector(const Matrix& m, Complex lambda,
                                 const std::vector<Complex>& start);

/// X with A X + X B + Q = 0, via the Kronecker-form linear system. Throws
/// no_unique_solution when the spectra of A and -B intersect.
Matrix solve_sylvester(const Matrix& a, const Matrix& b, const Matrix& q);

/// Classification by pivoted Cholesky. The input is symmetrized; asymmetry
/// beyond kSymmetryTolerance (relative) throws.
Definiteness definiteness(const Matrix& s);

/// Symmetric part of `s` after checking ||S - S^T|| <= tol * ||S||.
Matrix enforce_symmetric(const Matrix& s, const char* what,
                         double tol = kSymmetryTolerance);

/// Solves A X = B by LU with partial pivoting. Throws no_unique_solution on a
/// numerically singular A.
Matrix solve(const Matrix& a, const Matrix& b);

Matrix inverse(const Matrix& a);

/// Reusable LU factorization with partial pivoting. Row elimination runs on
/// the dispatching axpy kernel.
class LuFactorization {
 public:
  explicit LuFactorization(Matrix a);

  bool singular() const noexcept { return singular_; }
  /// min |u_ii| / max |u_ii|
  double pivot_ratio() const noexcept { return pivot_ratio_; }
  std::size_t dimension() const noexcept { return lu_.rows(); }

  /// Overwrites b (length n) with the solution.
  void solve_in_place(std::vector<double>& b) const;
  Matrix solve(const Matrix& b) const;

 private:
  Matrix lu_;
  std::vector<std::size_t> perm_;
  bool singular_ = false;
  double pivot_ratio_ = 0.0;
};

}  // namespace hvib
