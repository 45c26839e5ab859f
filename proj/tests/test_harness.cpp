#include <gtest/gtest.h>

#include <cmath>

#include "hvib/error.hpp"
#include "hvib/harness.hpp"
#include "hvib/matkit.hpp"
#include "hvib/riccati.hpp"

using namespace hvib;

namespace {

// gamma* is 3.704 at k = 0 and at most 2.69 for k >= 0.5.
AveragedSystem example(double k, double gamma) {
  return transform_system(example_plant(k, gamma, 0.1), 128);
}

Matrix are_solution(const AveragedSystem& avg) {
  const AreInput in = averaged_are_input(avg);
  return solve_stabilizing_are(in.A, in.D, in.C).R;
}

}  // namespace

TEST(Reference, ConstantCoefficientFixedPoint) {
  const AveragedSystem avg = example(0.0, 5.0);
  const Matrix r0 = are_solution(avg);
  const ReferenceSolution ref = reference_solution(avg, 0.1, r0 + 0.01 * Matrix::identity(2));
  for (const Matrix& m : ref.P.samples()) EXPECT_LT((m - r0).max_abs(), 1e-10);
  EXPECT_LT(ref.floquet_radius, 1.0);
}

TEST(Reference, SelfConsistentOrbit) {
  const AveragedSystem avg = example(0.5, 3.0);
  const ExpansionSeries s = build_series(avg, 3);
  const double eps = 0.05;
  const ReferenceSolution ref = reference_solution(avg, eps, eval_series(s, eps, 0.0, Coordinates::fast_P));
  const CoefficientTable table(avg, kDefaultRk4Steps);
  const Matrix back = riccati_flow(table, ref.P0, eps);
  EXPECT_LT((back - ref.P0).max_abs(), 1e-9);
  for (const Matrix& m : ref.P.samples()) {
    EXPECT_EQ(m, m.transpose());
    EXPECT_EQ(definiteness(m), Definiteness::positive_definite);
  }
  EXPECT_LT(sup_distance(ref.P, series_on_grid(s, eps)), 50.0 * std::pow(eps, 4));
}

TEST(Reference, BasinCheckFromScaledStart) {
  const AveragedSystem avg = example(0.5, 3.0);
  const ExpansionSeries s = build_series(avg, 3);
  const double eps = 0.01;
  const Matrix warm = eval_series(s, eps, 0.0, Coordinates::fast_P);
  const ReferenceSolution a = reference_solution(avg, eps, warm);
  const ReferenceSolution b = reference_solution(avg, eps, 5.0 * warm);
  EXPECT_LT(sup_distance(a.P, b.P), 1e-8);
}

TEST(Reference, BadInputs) {
  const AveragedSystem avg = example(0.5, 3.0);
  EXPECT_THROW(reference_solution(avg, 0.0, Matrix::identity(2)), Error);
  EXPECT_THROW(reference_solution(avg, 0.1, Matrix::identity(3)), Error);
}

TEST(Reference, BlowUpReportsDivergence) {
  const AveragedSystem avg = example(0.5, 3.0);
  try {
    reference_solution(avg, 0.1, -1e6 * Matrix::identity(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_TRUE(e.kind() == ErrorKind::divergence || e.kind() == ErrorKind::no_reference);
  }
}

TEST(Defect, ExactForTimeInvariantPlant) {
  const ExpansionSeries s = build_series(example(0.0, 5.0), 2);
  for (double eps : {0.2, 0.05}) EXPECT_LE(defect(s, eps), 1e-10);
}

TEST(Defect, ThirdOrderSlopeForFirstOrderSeries) {
  const ExpansionSeries s = build_series(example(0.5, 3.0), 1);
  const double d1 = defect(s, 0.1), d2 = defect(s, 0.05), d3 = defect(s, 0.025);
  for (double ratio : {d1 / d2, d2 / d3}) {
    EXPECT_GE(ratio, 8.0 * 0.7);
    EXPECT_LE(ratio, 8.0 * 1.4);
  }
}

TEST(Defect, HigherOrderImproves) {
  const AveragedSystem avg = example(0.5, 3.0);
  EXPECT_LT(defect(build_series(avg, 2), 0.05), defect(build_series(avg, 0), 0.05));
}

TEST(Floquet, ConstantCoefficientMonodromy) {
  const AveragedSystem avg = example(0.0, 5.0);
  const Matrix r0 = are_solution(avg);
  const SystemSpec& spec = avg.spec;
  const double eps = 0.1;
  const PeriodicMatrix p = PeriodicMatrix::constant(r0, 128, kTwoPi, true);
  const Matrix expected = mat_exp(kTwoPi * eps * (spec.A - spec.D() * r0));
  for (FloquetForm form : {FloquetForm::original, FloquetForm::transformed}) {
    const FloquetResult f = floquet(spec, p, eps, form);
    EXPECT_LT((f.monodromy - expected).max_abs(), 1e-10);
    EXPECT_TRUE(f.stable);
  }
}

TEST(Floquet, ExampleSeriesStable) {
  const AveragedSystem avg = example(0.5, 3.0);
  const ExpansionSeries s = build_series(avg, 2);
  const PeriodicMatrix p = series_on_grid(s, 0.05);
  const FloquetResult a = floquet(avg.spec, p, 0.05, FloquetForm::original);
  const FloquetResult b = floquet(avg.spec, p, 0.05, FloquetForm::transformed);
  EXPECT_LT(a.radius, 1.0);
  EXPECT_LT(b.radius, 1.0);
  // The two forms are similar through Psi(2 pi) = I.
  EXPECT_NEAR(a.radius, b.radius, 1e-9);
}

TEST(Floquet, UnstableFixture) {
  SystemSpec s = example_plant(0.0, 3.0, 0.1);
  s.A = Matrix{{0.1, 0}, {0, -1}};
  const FloquetResult f =
      floquet(s, PeriodicMatrix::constant(Matrix(2, 2), 64, kTwoPi, true), 0.1, FloquetForm::original);
  EXPECT_GT(f.radius, 1.0);
  EXPECT_FALSE(f.stable);
}

TEST(Simulate, ZeroDisturbanceIsZero) {
  const SystemSpec s = example_plant(0.0, 3.8, 0.1);
  const SimulationResult r = simulate(s, ControlMode::saddle, constant_riccati(are_solution(example(0.0, 3.8))),
                                      Disturbance{}, SimulationOptions{5.0, 0.01});
  EXPECT_EQ(r.J_value, 0.0);
  for (const auto& x : r.state)
    for (double v : x) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(r.time.size(), r.state.size());
  EXPECT_EQ(r.time.size(), r.w.size());
  EXPECT_NEAR(r.time.back(), 5.0, 1e-12);
}

TEST(Simulate, SaddleValueWithWorstCaseFeedback) {
  const SystemSpec s{Matrix{{-1}}, Matrix{{1}}, Matrix{{1}}, Matrix{{1}}, Matrix{{0}}, 1.0, 0.1};
  const Matrix r = are_solution(transform_system(s));
  Disturbance d;
  d.kind = Disturbance::Kind::worst_case;
  d.duration = 1.0;
  const SimulationResult res = simulate(s, ControlMode::saddle, constant_riccati(r), d, SimulationOptions{0.0, 0.01});
  EXPECT_LE(std::abs(res.saddle_residual), 1e-3 * s.gamma * s.gamma * res.w_energy);
  EXPECT_NEAR(res.horizon, default_horizon(s, r), 1e-9);
}

TEST(Simulate, GainBoundAndNonPositiveGame) {
  const double gamma = 3.8;
  const SystemSpec s = example_plant(0.0, gamma, 0.1);
  const Matrix r = are_solution(example(0.0, gamma));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Disturbance d;
    d.kind = Disturbance::Kind::noise;
    d.duration = 20.0;
    d.seed = seed;
    const SimulationResult res =
        simulate(s, ControlMode::saddle, constant_riccati(r), d, SimulationOptions{0.0, 0.01});
    EXPECT_LE(res.J_value, 1e-6) << seed;
    EXPECT_LE(res.gain_estimate, gamma) << seed;
    EXPECT_GT(res.w_energy, 0.0);
  }
}

TEST(Simulate, StepHalvingChangesJLittle) {
  const SystemSpec s{Matrix{{-1}}, Matrix{{1}}, Matrix{{1}}, Matrix{{1}}, Matrix{{0}}, 1.0, 0.1};
  const Matrix r = are_solution(transform_system(s));
  Disturbance d;
  d.kind = Disturbance::Kind::bump;
  d.duration = 2.0;
  const double j1 = simulate(s, ControlMode::saddle, constant_riccati(r), d, SimulationOptions{20.0, 0.02}).J_value;
  const double j2 = simulate(s, ControlMode::saddle, constant_riccati(r), d, SimulationOptions{20.0, 0.01}).J_value;
  EXPECT_LT(std::abs(j1 - j2), 0.01 * std::abs(j2));
}

TEST(Simulate, VibratedPlantRuns) {
  const AveragedSystem avg = transform_system(example_plant(0.5, 3.0, 0.05), 128);
  const ExpansionSeries series = build_series(avg, 2);
  Disturbance d;
  d.kind = Disturbance::Kind::noise;
  d.duration = 5.0;
  d.seed = 3;
  const SimulationResult r = simulate(avg.spec, ControlMode::open_loop, series_riccati(series, 0.05), d,
                                      SimulationOptions{10.0, 0.002});
  EXPECT_TRUE(std::isfinite(r.J_value));
  EXPECT_GT(r.gain_estimate, 0.0);
  EXPECT_LT(r.gain_estimate, 3.0 + 0.01);
}

TEST(Simulate, PreconditionsAndBlowUp) {
  const SystemSpec s = example_plant(0.0, 3.8, 0.1);
  Disturbance d;
  d.kind = Disturbance::Kind::worst_case;
  EXPECT_THROW(simulate(s, ControlMode::saddle, std::nullopt, d, SimulationOptions{1.0, 0.01}), Error);
  EXPECT_THROW(simulate(s, ControlMode::open_loop, std::nullopt, Disturbance{}, SimulationOptions{1.0, 0.0}), Error);
  SystemSpec u{Matrix{{5.0}}, Matrix{{1}}, Matrix{{1}}, Matrix{{1}}, Matrix{{0}}, 1.0, 0.1};
  Disturbance b;
  b.kind = Disturbance::Kind::bump;
  try {
    simulate(u, ControlMode::open_loop, std::nullopt, b, SimulationOptions{20.0, 0.01});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::divergence);
  }
}

TEST(Disturbance, KindNames) {
  for (auto k : {Disturbance::Kind::zero, Disturbance::Kind::bump, Disturbance::Kind::noise,
                 Disturbance::Kind::worst_case}) {
    EXPECT_EQ(parse_disturbance_kind(to_string(k)), k);
  }
  EXPECT_THROW(parse_disturbance_kind("white"), Error);
}

TEST(Verify, ExactRegimeForTimeInvariantPlant) {
  const std::vector<double> eps{0.1, 0.05, 0.025};
  const VerificationReport r = convergence_order(example(0.0, 5.0), eps, 1);
  EXPECT_TRUE(r.exact_regime);
  EXPECT_TRUE(r.certified);
  EXPECT_TRUE(std::isnan(r.error_order));
}

TEST(Verify, ExamplePlantOrders) {
  const std::vector<double> eps{0.1, 0.05, 0.025};
  const AveragedSystem avg = example(0.5, 3.0);
  const VerificationReport r1 = convergence_order(avg, eps, 1);
  EXPECT_GE(r1.error_order, 1.5);
  EXPECT_NEAR(r1.defect_order, 3.0, 0.5);
  const VerificationReport r2 = convergence_order(avg, eps, 2);
  EXPECT_GE(r2.error_order, 2.5);
  EXPECT_NEAR(r2.defect_order, 4.0, 0.5);
  EXPECT_TRUE(r2.certified);
  ASSERT_TRUE(r2.epsilon_star.has_value());
  EXPECT_DOUBLE_EQ(*r2.epsilon_star, 0.1);
}

TEST(Verify, ListValidation) {
  const AveragedSystem avg = example(0.5, 3.0);
  EXPECT_THROW(convergence_order(avg, std::vector<double>{0.1, 0.05}, 1), Error);
  EXPECT_THROW(convergence_order(avg, std::vector<double>{0.1, 0.06, 0.03}, 1), Error);
  EXPECT_THROW(verify(avg, std::vector<double>{0.05, 0.1}, 1), Error);
}
