#include "hvib/expansion.hpp"

#include <cmath>
#include <string>

#include "hvib/error.hpp"
#include "hvib/matkit.hpp"

namespace hvib {

namespace {

// S_i D S_j + S_j D S_i accumulated as T + T^T so that samples stay exactly
// symmetric.
void add_cross_term(Matrix& acc, const Matrix& si, const Matrix& d, const Matrix& sj,
                    bool diagonal) {
  const Matrix t = si * d * sj;
  if (diagonal) {
    acc += symmetrize(t);
  } else {
    acc += t;
    acc += t.transpose();
  }
}

// terms[i] holds S_i sampled on the grid (S_0 constant).
PeriodicMatrix bracket(const AveragedSystem& avg, const std::vector<std::vector<Matrix>>& terms,
                       std::size_t k) {
  const std::size_t grid = avg.grid_size();
  std::vector<Matrix> out;
  out.reserve(grid);
  for (std::size_t j = 0; j < grid; ++j) {
    const Matrix& a = avg.A_per[j];
    const Matrix& d = avg.D_per[j];
    const Matrix& sk = terms[k][j];
    Matrix f = -(a.transpose() * sk);
    f -= sk * a;
    for (std::size_t i = 0; 2 * i <= k; ++i) {
      add_cross_term(f, terms[i][j], d, terms[k - i][j], 2 * i == k);
    }
    if (k == 0) f -= avg.C_per[j];
    out.push_back(symmetrize(f));
  }
  return PeriodicMatrix(std::move(out), avg.A_per.period(), true);
}

std::vector<Matrix> constant_samples(const Matrix& m, std::size_t grid) {
  return std::vector<Matrix>(grid, m);
}

std::vector<Matrix> sum_samples(const Matrix& r, const PeriodicMatrix& pi) {
  std::vector<Matrix> out;
  out.reserve(pi.grid_size());
  for (const Matrix& s : pi.samples()) out.push_back(r + s);
  return out;
}

std::vector<std::vector<Matrix>> series_terms(const ExpansionSeries& s) {
  const std::size_t grid = s.source.grid_size();
  std::vector<std::vector<Matrix>> terms;
  terms.push_back(constant_samples(s.constants[0], grid));
  for (std::size_t k = 1; k <= s.order; ++k) {
    terms.push_back(sum_samples(s.constants[k], s.periodics[k - 1]));
  }
  const PeriodicMatrix& last = s.periodics[s.order];
  terms.emplace_back(last.samples().begin(), last.samples().end());
  return terms;
}

}  // namespace

std::string_view to_string(Coordinates c) {
  return c == Coordinates::fast_P ? "fast_P" : "original_R";
}

ExpansionSeries build_series(const AveragedSystem& avg, std::size_t order) {
  if (order > kMaxSeriesOrder) {
    fail(ErrorKind::precondition, "series order above " + std::to_string(kMaxSeriesOrder));
  }
  const AreInput are = averaged_are_input(avg);
  FeasibilityResult feas = is_feasible(are.A, are.D, are.C);
  if (!feas.feasible) {
    fail(ErrorKind::precondition, "averaged Riccati equation is infeasible: " + feas.reason);
  }

  const std::size_t grid = avg.grid_size();
  ExpansionSeries s{order, {}, {}, feas.certificate->closed_loop, *feas.certificate, avg};
  s.constants.push_back(feas.certificate->R);

  std::vector<std::vector<Matrix>> terms;
  terms.push_back(constant_samples(s.constants[0], grid));

  PeriodicMatrix f = bracket(avg, terms, 0);
  s.periodics.push_back(zero_mean_antiderivative(detrend(f)));

  for (std::size_t k = 1; k <= order; ++k) {
    const PeriodicMatrix& pi_k = s.periodics.back();
    terms.emplace_back(pi_k.samples().begin(), pi_k.samples().end());
    // The unknown constant R_k enters the mean of the bracket only through
    // -(Acl^T R_k + R_k Acl); everything else is already known.
    const Matrix known_mean = average(bracket(avg, terms, k));
    Matrix r_k = solve_lyapunov(s.closed_loop_avg, -known_mean);
    terms[k] = sum_samples(r_k, pi_k);
    s.constants.push_back(std::move(r_k));

    f = bracket(avg, terms, k);
    s.periodics.push_back(zero_mean_antiderivative(detrend(f)));
  }
  return s;
}

PeriodicMatrix order_bracket(const ExpansionSeries& series, std::size_t k) {
  if (k > series.order + 1) fail(ErrorKind::precondition, "bracket order out of range");
  auto terms = series_terms(series);
  // terms above k do not enter F_k
  terms.resize(k + 1);
  return bracket(series.source, terms, k);
}

PeriodicMatrix series_on_grid(const ExpansionSeries& series, double eps) {
  const std::size_t grid = series.source.grid_size();
  std::vector<Matrix> out(grid, series.constants[0]);
  double power = 1.0;
  for (std::size_t k = 1; k <= series.order + 1; ++k) {
    power *= eps;
    const PeriodicMatrix& pi = series.periodics[k - 1];
    for (std::size_t j = 0; j < grid; ++j) {
      if (k <= series.order) out[j].add_scaled(power, series.constants[k]);
      out[j].add_scaled(power, pi[j]);
    }
  }
  return PeriodicMatrix(std::move(out), series.source.A_per.period(), true);
}

Matrix eval_series(const ExpansionSeries& series, double eps, double t,
                   Coordinates coordinates) {
  if (!(eps > 0.0)) fail(ErrorKind::precondition, "eval_series: eps must be positive");
  const double tau = t / eps;
  Matrix p = series.constants[0];
  double power = 1.0;
  for (std::size_t k = 1; k <= series.order + 1; ++k) {
    power *= eps;
    if (k <= series.order) p.add_scaled(power, series.constants[k]);
    p.add_scaled(power, eval(series.periodics[k - 1], tau));
  }
  p = symmetrize(p);
  if (coordinates == Coordinates::fast_P) return p;
  const Matrix ps = psi(series.source.spec.K, tau, series.source.convention);
  return symmetrize(ps * p * ps.transpose());
}

PeriodicMatrix to_original(const PeriodicMatrix& p, const SystemSpec& spec,
                           PhaseConvention convention) {
  std::vector<Matrix> out;
  out.reserve(p.grid_size());
  for (std::size_t j = 0; j < p.grid_size(); ++j) {
    const Matrix ps = psi(spec.K, p.node(j), convention);
    out.push_back(symmetrize(ps * p[j] * ps.transpose()));
  }
  return PeriodicMatrix(std::move(out), p.period(), true);
}

}  // namespace hvib
