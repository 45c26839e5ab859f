#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hvib/error.hpp"
#include "hvib/matkit.hpp"
#include "hvib/riccati.hpp"
#include "oracles.hpp"
#include "properties.hpp"

using namespace hvib;

namespace {

const Matrix kA{{0, 1}, {-0.27, -2.8}};

Matrix example_d(double gamma) { return Matrix{{0, 0}, {0, -1.0 / (gamma * gamma)}}; }

}  // namespace

TEST(StabilizingAre, ScalarQuadraticFormula) {
  const StabilizingSolution s =
      solve_stabilizing_are(Matrix{{-1}}, Matrix{{1}}, Matrix{{1}});
  EXPECT_NEAR(s.R(0, 0), std::sqrt(2.0) - 1.0, 1e-13);
  EXPECT_NEAR(s.closed_loop(0, 0), -std::sqrt(2.0), 1e-13);
}

TEST(StabilizingAre, ScalarOracleSweep) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-3.0, 3.0), pos(0.1, 3.0);
  for (int t = 0; t < 100; ++t) {
    const double a = u(rng), d = pos(rng) * (t % 2 ? 1.0 : -0.2), c = pos(rng);
    if (a * a + d * c <= 1e-3) continue;
    if (d < 0 && a >= 0) continue;
    const double r = oracle::scalar_are(a, d, c);
    const StabilizingSolution s = solve_stabilizing_are(Matrix{{a}}, Matrix{{d}}, Matrix{{c}});
    EXPECT_NEAR(s.R(0, 0), r, 1e-10 * (1 + std::abs(r))) << a << " " << d << " " << c;
  }
}

TEST(StabilizingAre, ZeroWeightGivesZero) {
  const StabilizingSolution s = solve_stabilizing_are(kA, example_d(2.0), Matrix(2, 2));
  EXPECT_LT(s.R.max_abs(), 1e-14);
  EXPECT_LT((s.closed_loop - kA).max_abs(), 1e-14);
}

TEST(StabilizingAre, ExamplePlantBracket) {
  // The exact threshold is 1 / 0.27 = 3.7037037.
  EXPECT_FALSE(is_feasible(kA, example_d(3.703), Matrix::identity(2)).feasible);
  const FeasibilityResult f = is_feasible(kA, example_d(3.71), Matrix::identity(2));
  ASSERT_TRUE(f.feasible);
  EXPECT_EQ(definiteness(f.certificate->R), Definiteness::positive_definite);
}

TEST(StabilizingAre, ClosedLoopMatchesStableHamiltonianSpectrum) {
  std::mt19937_64 rng(22);
  int checked = 0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 1 + t % 6;
    const Matrix a = oracle::random_matrix(rng, n, n);
    const Matrix b = oracle::random_matrix(rng, n, 1);
    const Matrix c = oracle::random_spd(rng, n);
    const Matrix d = b * b.transpose();
    const StabilizingSolution s = solve_stabilizing_are(a, d, c);
    std::vector<Complex> stable;
    for (const Complex& z : eigenvalues(hamiltonian(a, d, c)).eigenvalues) {
      if (z.real() < 0) stable.push_back(z);
    }
    ASSERT_EQ(stable.size(), n);
    // Nearly unstabilizable draws give huge R; A - D R then cancels to ~eps |D| |R|.
    if (s.R.norm() > 1e4) continue;
    ++checked;
    EXPECT_LT(oracle::spectrum_distance(eigenvalues(s.closed_loop).eigenvalues, stable),
              1e-7 * (1 + a.norm()));
  }
  EXPECT_GE(checked, 40);
}

TEST(StabilizingAre, RejectsAsymmetricInput) {
  try {
    solve_stabilizing_are(kA, Matrix{{0, 1}, {0, 0}}, Matrix::identity(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::asymmetry);
  }
  EXPECT_THROW(solve_stabilizing_are(kA, Matrix(3, 3), Matrix::identity(2)), Error);
}

TEST(Lyapunov, ClosedForms) {
  const Matrix q{{2, 1}, {1, 3}};
  EXPECT_LT((solve_lyapunov(-0.5 * Matrix::identity(2), q) - q).max_abs(), 1e-14);
  EXPECT_NEAR(solve_lyapunov(Matrix{{-2}}, Matrix{{8}})(0, 0), 2.0, 1e-14);
}

TEST(Lyapunov, RandomResidual) {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 20; ++t) {
    const Matrix acl = oracle::random_hurwitz(rng, 4);
    const Matrix w = symmetrize(oracle::random_matrix(rng, 4, 4));
    const Matrix r = solve_lyapunov(acl, w);
    EXPECT_LT((acl.transpose() * r + r * acl + w).max_abs(), 1e-10 * (1 + r.max_abs()));
    EXPECT_EQ(r, r.transpose());
  }
}

TEST(Lyapunov, NonHurwitzRejected) {
  try {
    solve_lyapunov(Matrix{{0.1}}, Matrix{{1}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::precondition);
  }
}

TEST(Feasibility, ExamplePlantVerdicts) {
  EXPECT_TRUE(is_feasible(kA, example_d(10.0), Matrix::identity(2)).feasible);
  EXPECT_FALSE(is_feasible(kA, example_d(1.0), Matrix::identity(2)).feasible);
  const FeasibilityResult lyap = is_feasible(kA, Matrix(2, 2), Matrix::identity(2));
  ASSERT_TRUE(lyap.feasible);
  EXPECT_EQ(definiteness(lyap.certificate->R), Definiteness::positive_definite);
}

TEST(Feasibility, UnstabilizableIsInfeasible) {
  // Unstable mode that neither control nor anything else can reach.
  const FeasibilityResult f = is_feasible(Matrix{{1, 0}, {0, -1}}, Matrix{{0, 0}, {0, 1}}, Matrix::identity(2));
  EXPECT_FALSE(f.feasible);
  EXPECT_FALSE(f.reason.empty());
}

TEST(Properties, AreResiduals) {
  const props::Outcome o = props::are_residuals(200, 201);
  EXPECT_TRUE(o.ok()) << o.first_failure;
}

TEST(Properties, SylvesterResiduals) {
  const props::Outcome o = props::sylvester_residuals(200, 202);
  EXPECT_TRUE(o.ok()) << o.first_failure;
}
