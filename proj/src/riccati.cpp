#include "hvib/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "hvib/error.hpp"

namespace hvib {

namespace {

void check_are_shapes(const Matrix& a, const Matrix& d, const Matrix& c) {
  const std::size_t n = a.rows();
  if (!a.is_square() || d.rows() != n || d.cols() != n || c.rows() != n ||
      c.cols() != n) {
    fail(ErrorKind::dimension, "Riccati data must be n x n");
  }
  if (n > kMaxStateDimension) fail(ErrorKind::dimension, "state dimension above 32");
  if (!a.all_finite() || !d.all_finite() || !c.all_finite()) {
    fail(ErrorKind::precondition, "Riccati data has non-finite entries");
  }
}

// Deterministic start vectors for inverse iteration; distinct per index so
// that a repeated semisimple eigenvalue yields independent vectors.
std::vector<Complex> start_vector(std::size_t n, std::size_t index) {
  std::vector<Complex> v(n);
  std::uint64_t state = 0x9e3779b97f4a7c15ULL * (index + 1);
  for (std::size_t i = 0; i < n; ++i) {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    const double re = static_cast<double>(state % 1000003) / 1000003.0 - 0.5;
    const double im = static_cast<double>((state >> 20) % 999983) / 999983.0 - 0.5;
    v[i] = Complex(1.0 + re, im);
  }
  return v;
}

Complex inner(const std::vector<Complex>& u, const std::vector<Complex>& v) {
  Complex s{};
  for (std::size_t i = 0; i < u.size(); ++i) s += std::conj(u[i]) * v[i];
  return s;
}

// Real basis [X1; X2] of the stable invariant subspace.
Matrix stable_subspace(const Matrix& h, const std::vector<Complex>& stable,
                       double cluster_tol) {
  const std::size_t two_n = h.rows();
  const std::size_t n = two_n / 2;
  Matrix basis(two_n, n);
  std::size_t col = 0;
  std::vector<std::vector<Complex>> done;
  std::vector<Complex> done_lambda;
  for (std::size_t idx = 0; idx < stable.size(); ++idx) {
    const Complex lambda = stable[idx];
    if (lambda.imag() < 0.0) continue;  // conjugate partner handled via Im > 0
    std::vector<Complex> v = eigenvector(h, lambda, start_vector(two_n, idx));
    for (std::size_t k = 0; k < done.size(); ++k) {
      if (std::abs(done_lambda[k] - lambda) <= cluster_tol) {
        const Complex proj = inner(done[k], v);
        for (std::size_t i = 0; i < two_n; ++i) v[i] -= proj * done[k][i];
      }
    }
    double nv = std::sqrt(std::real(inner(v, v)));
    if (nv == 0.0) fail(ErrorKind::infeasible, "degenerate stable eigenvector");
    for (Complex& z : v) z /= nv;
    done.push_back(v);
    done_lambda.push_back(lambda);

    if (lambda.imag() == 0.0) {
      // rotate so the largest component is real
      std::size_t big = 0;
      for (std::size_t i = 1; i < two_n; ++i)
        if (std::abs(v[i]) > std::abs(v[big])) big = i;
      const Complex phase = std::abs(v[big]) > 0 ? std::conj(v[big]) / std::abs(v[big]) : 1.0;
      if (col >= n) fail(ErrorKind::infeasible, "stable subspace dimension mismatch");
      for (std::size_t i = 0; i < two_n; ++i) basis(i, col) = (v[i] * phase).real();
      ++col;
    } else {
      if (col + 2 > n) fail(ErrorKind::infeasible, "stable subspace dimension mismatch");
      for (std::size_t i = 0; i < two_n; ++i) {
        basis(i, col) = v[i].real();
        basis(i, col + 1) = v[i].imag();
      }
      col += 2;
    }
  }
  if (col != n) fail(ErrorKind::infeasible, "stable subspace dimension mismatch");
  return basis;
}

}  // namespace

Matrix are_residual(const Matrix& a, const Matrix& d, const Matrix& c,
                    const Matrix& r) {
  const Matrix rd = r * d;
  Matrix res = rd * r;
  res -= a.transpose() * r;
  res -= r * a;
  res -= c;
  return symmetrize(res);
}

double are_scale(const Matrix& a, const Matrix& d, const Matrix& c) {
  return std::max(1.0, a.norm() + d.norm() + c.norm());
}

Matrix hamiltonian(const Matrix& a, const Matrix& d, const Matrix& c) {
  const std::size_t n = a.rows();
  Matrix h(2 * n, 2 * n);
  h.set_block(0, 0, a);
  h.set_block(0, n, -d);
  h.set_block(n, 0, -c);
  h.set_block(n, n, -a.transpose());
  return h;
}

Matrix solve_lyapunov(const Matrix& acl, const Matrix& w) {
  if (!acl.is_square() || w.rows() != acl.rows() || w.cols() != acl.cols()) {
    fail(ErrorKind::dimension, "solve_lyapunov: shapes");
  }
  if (!is_hurwitz(acl)) {
    fail(ErrorKind::precondition, "solve_lyapunov: closed loop is not Hurwitz");
  }
  const Matrix ws = enforce_symmetric(w, "solve_lyapunov(W)");
  return symmetrize(solve_sylvester(acl.transpose(), acl, ws));
}

StabilizingSolution solve_stabilizing_are(const Matrix& a, const Matrix& d_in,
                                          const Matrix& c_in) {
  check_are_shapes(a, d_in, c_in);
  const Matrix d = enforce_symmetric(d_in, "ARE quadratic term");
  const Matrix c = enforce_symmetric(c_in, "ARE constant term");
  const std::size_t n = a.rows();
  if (n == 0) return StabilizingSolution{Matrix(), Matrix(), 0.0, 0.0, 0};

  const Matrix h = hamiltonian(a, d, c);
  const double hnorm = std::max(1.0, h.norm());
  const SpectrumReport spec = eigenvalues(h);
  std::vector<Complex> stable;
  for (const Complex& z : spec.eigenvalues) {
    if (std::abs(z.real()) <= kImaginaryAxisMargin * hnorm) {
      fail(ErrorKind::infeasible, "Hamiltonian has eigenvalues on the imaginary axis");
    }
    if (z.real() < 0.0) stable.push_back(z);
  }
  if (stable.size() != n) {
    fail(ErrorKind::infeasible, "Hamiltonian stable subspace has wrong dimension");
  }

  const Matrix basis = stable_subspace(h, stable, 1e-6 * hnorm);
  const Matrix x1 = basis.block(0, 0, n, n);
  const Matrix x2 = basis.block(n, 0, n, n);
  const LuFactorization lu(x1.transpose());
  if (lu.singular() || lu.pivot_ratio() < 1e-12) {
    fail(ErrorKind::infeasible, "stable subspace is not a graph (X1 singular)");
  }
  // R X1 = X2  <=>  X1^T R^T = X2^T
  Matrix r = symmetrize(lu.solve(x2.transpose()).transpose());

  const double scale = are_scale(a, d, c);
  auto accept_tol = [&](const Matrix& rr) {
    const double g = 1.0 + rr.norm();
    return 1e-9 * g * g * scale;
  };

  Matrix res = are_residual(a, d, c, r);
  double res_norm = res.norm();
  int steps = 0;
  for (; steps < 50; ++steps) {
    const double floor = 1e-15 * (1.0 + r.norm()) * (1.0 + r.norm()) * scale;
    if (res_norm <= floor) break;
    const Matrix acl = a - d * r;
    if (!is_hurwitz(acl, 0.0)) {
      fail(ErrorKind::numerical_failure, "Newton refinement left the stabilizing branch");
    }
    Matrix candidate = r + symmetrize(solve_sylvester(acl.transpose(), acl, -res));
    Matrix cand_res = are_residual(a, d, c, candidate);
    const double cand_norm = cand_res.norm();
    if (!(cand_norm < res_norm)) break;  // rounding floor
    r = std::move(candidate);
    res = std::move(cand_res);
    res_norm = cand_norm;
  }
  if (!(res_norm <= accept_tol(r))) {
    fail(ErrorKind::numerical_failure,
         "Riccati Newton refinement stagnated at residual " + std::to_string(res_norm));
  }

  StabilizingSolution sol;
  sol.closed_loop = a - d * r;
  const SpectrumReport cl = eigenvalues(sol.closed_loop);
  sol.stability_margin = -cl.max_real_part;
  if (!(sol.stability_margin > kDefaultHurwitzMargin)) {
    fail(ErrorKind::infeasible, "closed loop A - D R is not Hurwitz");
  }
  sol.R = std::move(r);
  sol.residual_norm = res_norm;
  sol.newton_steps = steps;
  return sol;
}

FeasibilityResult is_feasible(const Matrix& a, const Matrix& d, const Matrix& c) {
  FeasibilityResult out;
  try {
    StabilizingSolution sol = solve_stabilizing_are(a, d, c);
    const Definiteness def = definiteness(sol.R);
    out.definiteness = def;
    out.feasible = def == Definiteness::positive_definite;
    if (!out.feasible) {
      out.reason = std::string("stabilizing solution is ") + to_string(def);
    }
    out.certificate = std::move(sol);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::dimension || e.kind() == ErrorKind::asymmetry) throw;
    out.feasible = false;
    out.reason = std::string(to_string(e.kind())) + ": " + e.what();
  }
  return out;
}

}  // namespace hvib
