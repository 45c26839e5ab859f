#include "hvib/hinf.hpp"

#include <array>
#include <cmath>
#include <string>
#include <utility>

#include "hvib/error.hpp"
#include "hvib/matkit.hpp"

namespace hvib {

GammaProblem GammaProblem::from_averaged(const AveragedSystem& avg) {
  GammaProblem p;
  p.a_bar = avg.A_bar;
  p.c_bar = symmetrize(avg.C_bar);
  const Matrix control = avg.D_control_bar;
  const Matrix disturbance = avg.D_disturbance_bar;
  p.d_bar = [control, disturbance](double gamma) {
    Matrix d = control;
    d.add_scaled(-1.0 / (gamma * gamma), disturbance);
    return symmetrize(d);
  };
  return p;
}

GammaProblem GammaProblem::from_explicit(const Matrix& a_bar, const Matrix& b1,
                                         const Matrix& b2, const Matrix& c_bar) {
  GammaProblem p;
  p.a_bar = a_bar;
  p.c_bar = symmetrize(c_bar);
  const Matrix control = symmetrize(b1 * b1.transpose());
  const Matrix disturbance = symmetrize(b2 * b2.transpose());
  p.d_bar = [control, disturbance](double gamma) {
    Matrix d = control;
    d.add_scaled(-1.0 / (gamma * gamma), disturbance);
    return symmetrize(d);
  };
  return p;
}

FeasibilityResult GammaProblem::feasible_at(double gamma) const {
  return is_feasible(a_bar, d_bar(gamma), c_bar);
}

GammaResult gamma_star(const GammaProblem& problem, const GammaOptions& options) {
  if (!(options.tol > 0.0)) fail(ErrorKind::precondition, "gamma_star: tol must be positive");
  if (!(options.gamma_max > 0.0)) fail(ErrorKind::precondition, "gamma_star: gamma_max must be positive");

  GammaResult out;
  out.tolerance = options.tol;
  double lo = 0.0;
  double hi = 1.0;
  FeasibilityResult at_hi = problem.feasible_at(hi);
  ++out.evaluations;
  while (!at_hi.feasible) {
    lo = hi;
    hi *= 2.0;
    if (hi > options.gamma_max) {
      fail(ErrorKind::unattainable, "no feasible gamma up to gamma_max = " +
                                        std::to_string(options.gamma_max) +
                                        " (last reason: " + at_hi.reason + ")");
    }
    at_hi = problem.feasible_at(hi);
    ++out.evaluations;
  }
  while (hi - lo > options.tol) {
    const double mid = 0.5 * (lo + hi);
    FeasibilityResult r = problem.feasible_at(mid);
    ++out.evaluations;
    if (r.feasible) {
      hi = mid;
      at_hi = std::move(r);
    } else {
      lo = mid;
    }
  }

  // Recheck the bracket and probe monotonicity above it.
  const bool hi_ok = problem.feasible_at(hi).feasible;
  const bool lo_ok = lo > 0.0 && problem.feasible_at(lo).feasible;
  const bool above_ok = problem.feasible_at(2.0 * hi).feasible;
  out.evaluations += 3;
  if (!hi_ok || lo_ok || !above_ok) {
    fail(ErrorKind::numerical_inconsistency,
         "non-monotone feasibility verdicts around gamma = " + std::to_string(hi));
  }

  out.gamma_lo = lo;
  out.gamma_hi = hi;
  out.gamma_star = 0.5 * (lo + hi);
  out.certificate_at_hi = std::move(*at_hi.certificate);
  return out;
}

GainPair controller_gains(const Matrix& R, const SystemSpec& spec) {
  if (definiteness(R) != Definiteness::positive_definite) {
    fail(ErrorKind::precondition, "controller_gains: R is not positive definite");
  }
  if (R.rows() != spec.n()) fail(ErrorKind::dimension, "controller_gains: R must be n x n");
  GainPair g;
  g.gamma = spec.gamma;
  g.Ku = spec.B1.transpose() * R;
  g.Kw = (spec.B2.transpose() * R) * (1.0 / (spec.gamma * spec.gamma));
  return g;
}

SystemSpec example_plant(double k, double gamma, double epsilon,
                         VibrationCoupling coupling) {
  SystemSpec s;
  s.A = Matrix{{0.0, 1.0}, {-0.27, -2.8}};
  s.B1 = Matrix(2, 0);
  s.B2 = Matrix{{0.0}, {1.0}};
  s.L = Matrix::identity(2);
  s.K = coupling == VibrationCoupling::off_diagonal ? Matrix{{0.0, 0.0}, {k, 0.0}}
                                                    : Matrix{{0.0, 0.0}, {0.0, k}};
  s.gamma = gamma;
  s.epsilon = epsilon;
  return s;
}

Matrix example_table_a_bar(double k) {
  return Matrix{{0.0, 1.0}, {-0.27 - 0.5 * k * k, -2.8}};
}

std::optional<double> published_gamma(double k) {
  static constexpr std::array<std::pair<double, double>, 8> table = {{
      {0.0, 3.704},
      {0.25, 3.320},
      {0.5, 2.532},
      {0.75, 1.815},
      {1.0, 1.300},
      {1.25, 0.925},
      {1.5, 0.717},
      {1.75, 0.556},
  }};
  for (const auto& [kk, g] : table) {
    if (std::abs(kk - k) < 1e-12) return g;
  }
  return std::nullopt;
}

std::vector<double> default_table_k_values() {
  return {0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75};
}

std::vector<PaperTableRow> paper_table(std::span<const double> k_values,
                                       const PaperTableOptions& options) {
  std::vector<PaperTableRow> rows;
  rows.reserve(k_values.size());
  const GammaOptions gopt{options.tol, 1e6};
  for (double k : k_values) {
    if (!(k >= 0.0)) fail(ErrorKind::precondition, "paper_table: k must be >= 0");
    PaperTableRow row;
    row.k = k;
    const SystemSpec plant = example_plant(k, 1.0, 0.1);
    const GammaProblem fixture = GammaProblem::from_explicit(
        example_table_a_bar(k), plant.B1, plant.B2, Matrix::identity(2));
    row.gamma_fixture = gamma_star(fixture, gopt).gamma_star;

    const AveragedSystem avg = transform_system(plant, options.grid_size, options.convention);
    row.gamma_pipeline = gamma_star(GammaProblem::from_averaged(avg), gopt).gamma_star;

    row.published = published_gamma(k);
    row.flagged = row.published && std::abs(*row.published - row.gamma_fixture) > 0.005;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace hvib
