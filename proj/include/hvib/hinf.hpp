#pragma once

// Minimal attenuation level by bisection on feasibility of the averaged
// H-infinity Riccati equation, saddle-point gains, and the k-sweep table for
// the damped-oscillator example.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "hvib/matrix.hpp"
#include "hvib/riccati.hpp"
#include "hvib/vibration.hpp"

namespace hvib {

/// The gamma-dependent ARE  -A^T R - R A + R D(gamma) R - C = 0.
struct GammaProblem {
  Matrix a_bar;
  Matrix c_bar;
  std::function<Matrix(double gamma)> d_bar;

  /// D(gamma) rebuilt from the averaged transforms of B1 B1^T and B2 B2^T.
  static GammaProblem from_averaged(const AveragedSystem& avg);
  /// D(gamma) = B1 B1^T - gamma^-2 B2 B2^T with the given constant A, C.
  static GammaProblem from_explicit(const Matrix& a_bar, const Matrix& b1,
                                    const Matrix& b2, const Matrix& c_bar);

  FeasibilityResult feasible_at(double gamma) const;
};

struct GammaOptions {
  double tol = 1e-4;
  double gamma_max = 1e6;
};

struct GammaResult {
  double gamma_star = 0.0;
  double gamma_lo = 0.0;  // infeasible (0 stands for the trivial bound)
  double gamma_hi = 0.0;  // feasible
  double tolerance = 0.0;
  StabilizingSolution certificate_at_hi;
  int evaluations = 0;
};

/// Bisection: gamma_hi doubles from 1 until feasible, gamma_lo starts at 0,
/// halve until the bracket is narrower than tol; gamma_star is the midpoint.
/// Throws unattainable if infeasible beyond gamma_max, and
/// numerical_inconsistency when the bracket certificate fails a recheck.
GammaResult gamma_star(const GammaProblem& problem, const GammaOptions& options = {});

struct GainPair {
  Matrix Ku;  // u* = -Ku x
  Matrix Kw;  // w* =  Kw x
  double gamma = 0.0;
};

/// Ku = B1^T R, Kw = gamma^-2 B2^T R. R must be positive definite.
GainPair controller_gains(const Matrix& R, const SystemSpec& spec);

// Example plant: A = [[0, 1], [-0.27, -2.8]], B2 = [0; 1], L = I, no control.
enum class VibrationCoupling {
  off_diagonal,  // K = [[0, 0], [k, 0]]
  diagonal,      // K = [[0, 0], [0, k]]
};

SystemSpec example_plant(double k, double gamma, double epsilon,
                         VibrationCoupling coupling = VibrationCoupling::off_diagonal);

/// Averaged matrix used for the published table: [[0, 1], [-0.27 - k^2/2, -2.8]].
Matrix example_table_a_bar(double k);

struct PaperTableOptions {
  double tol = 1e-4;
  std::size_t grid_size = kDefaultGridSize;
  PhaseConvention convention = PhaseConvention::paper;
};

struct PaperTableRow {
  double k = 0.0;
  double gamma_fixture = 0.0;   // averaged equation with C_bar = I
  double gamma_pipeline = 0.0;  // full transform, rigorous C_bar
  std::optional<double> published;
  bool flagged = false;         // |fixture - published| > 0.005
};

/// Published gamma*_K values, or nullopt for k outside the table.
std::optional<double> published_gamma(double k);

std::vector<PaperTableRow> paper_table(std::span<const double> k_values,
                                       const PaperTableOptions& options = {});

std::vector<double> default_table_k_values();

}  // namespace hvib
