// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "hvib/error.hpp"
#include "hvib/harness.hpp"
#include "hvib/hinf.hpp"
#include "hvib/matkit.hpp"
#include "hvib/riccati.hpp"
#include "oracles.hpp"
#include "properties.hpp"

using namespace hvib;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " FAILED[" << what << "]";
    }
  }
};

using Check = std::function<void(Verdict&)>;

bool run(int id, const char* title, double budget_s, const Check& check) {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    check(v);
  } catch (const std::exception& e) {
    v.pass = false;
    v.detail << " exception: " << e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0.0 && secs > budget_s) {
    v.pass = false;
    v.detail << " FAILED[runtime budget " << budget_s << " s]";
  }
  std::printf("[%s] criterion %d: %s (%.2f s)%s\n", v.pass ? "PASS" : "FAIL", id, title, secs,
              v.detail.str().c_str());
  std::fflush(stdout);
  return v.pass;
}

GammaProblem table_fixture(double k) {
  return GammaProblem::from_explicit(example_table_a_bar(k), Matrix(2, 0), Matrix{{0}, {1}},
                                     Matrix::identity(2));
}

SystemSpec scalar_plant(double gamma) {
  return SystemSpec{Matrix{{-1}}, Matrix{{1}}, Matrix{{1}}, Matrix{{1}}, Matrix{{0}}, gamma, 0.1};
}

void criterion1(Verdict& v) {
  const auto rows = paper_table(default_table_k_values(), PaperTableOptions{1e-4, 128, PhaseConvention::paper});
  double worst = 0.0;
  for (const PaperTableRow& r : rows) {
    if (r.k == 1.25) {
      const double oracle = 1.0 / (0.27 + r.k * r.k / 2);
      v.require(std::abs(r.gamma_fixture - oracle) <= 0.002, "k=1.25 vs oracle");
      v.require(r.flagged, "k=1.25 flagged");
      v.detail << " k=1.25: " << r.gamma_fixture << " (oracle " << oracle << ", published 0.925 flagged)";
      continue;
    }
    const double err = std::abs(r.gamma_fixture - *r.published);
    worst = std::max(worst, err);
    v.require(err <= 0.005, "k=" + std::to_string(r.k));
  }
  v.detail << " max |fixture - published| = " << worst << " over 7 rows (tol 0.005);";
}

void criterion2(Verdict& v) {
  double worst = 0.0;
  for (double k : default_table_k_values()) {
    const double g = gamma_star(table_fixture(k), GammaOptions{1e-4, 1e6}).gamma_star;
    const double h = oracle::hinf_norm_sweep(example_table_a_bar(k), Matrix{{0}, {1}}, Matrix::identity(2));
    const double rel = std::abs(g - h) / h;
    worst = std::max(worst, rel);
    v.require(rel <= 1e-3, "k=" + std::to_string(k));
  }
  v.detail << " max relative gap bisection vs frequency sweep = " << worst << " (tol 1e-3)";
}

void criterion3(Verdict& v) {
  const AveragedSystem avg = transform_system(scalar_plant(1.0), 64);
  const double g = gamma_star(GammaProblem::from_averaged(avg), GammaOptions{1e-5, 1e6}).gamma_star;
  const double err = std::abs(g - 1.0 / std::sqrt(2.0));
  v.require(err <= 1e-4, "gamma*");
  v.detail << " gamma* = " << g << ", |error| = " << err << " (tol 1e-4)";
}

void criterion4(Verdict& v) {
  const AveragedSystem avg = transform_system(example_plant(0.5, 3.0, 0.1), 128);
  const std::vector<double> eps{0.1, 0.05, 0.025};
  for (std::size_t n = 0; n <= 2; ++n) {
    const VerificationReport r = convergence_order(avg, eps, n);
    v.require(r.error_order >= n + 0.5, "error order N=" + std::to_string(n));
    v.require(r.defect_order >= n + 1.5, "defect order N=" + std::to_string(n));
    v.detail << " N=" << n << ": error " << r.error_order << " (>= " << n + 0.5 << "), defect "
             << r.defect_order << " (>= " << n + 1.5 << ");";
  }
}

void criterion5(Verdict& v) {
  const AveragedSystem avg = transform_system(example_plant(0.5, 3.0, 0.1), 128);
  double worst = 0.0;
  for (std::size_t n = 0; n <= 2; ++n) {
    const VerificationReport r = verify(avg, default_epsilon_sweep(), n);
    const ExpansionSeries s = build_series(avg, n);
    for (const EpsilonRecord& e : r.records) {
      if (e.epsilon > 0.1) continue;
      const std::string tag = "N=" + std::to_string(n) + " eps=" + std::to_string(e.epsilon);
      v.require(e.floquet_radius < 1.0, "radius " + tag);
      v.require(e.positive_definite_ok, "definite " + tag);
      const FloquetResult orig =
          floquet(avg.spec, series_on_grid(s, e.epsilon), e.epsilon, FloquetForm::original);
      v.require(orig.radius < 1.0, "original-form radius " + tag);
      worst = std::max({worst, e.floquet_radius, orig.radius});
    }
  }
  SystemSpec bad = example_plant(0.0, 3.0, 0.1);
  bad.A = Matrix{{0.1, 0}, {0, -1}};
  const double unstable =
      floquet(bad, PeriodicMatrix::constant(Matrix(2, 2), 64, kTwoPi, true), 0.1, FloquetForm::original).radius;
  v.require(unstable > 1.0, "unstable fixture");
  v.detail << " max radius over N<=2, eps<=0.1: " << worst << "; all nodes positive definite; unstable fixture radius "
           << unstable;
}

void criterion6(Verdict& v) {
  struct Case {
    const char* name;
    SystemSpec spec;
  };
  const double g_ex = gamma_star(GammaProblem::from_averaged(transform_system(example_plant(0.0, 1.0, 0.1))),
                                 GammaOptions{1e-6, 1e6}).gamma_star;
  const double g_sc = gamma_star(GammaProblem::from_averaged(transform_system(scalar_plant(1.0))),
                                 GammaOptions{1e-6, 1e6}).gamma_star;
  const std::vector<Case> cases{{"example k=0", example_plant(0.0, 1.05 * g_ex, 0.1)},
                                {"scalar", scalar_plant(1.05 * g_sc)}};
  for (const Case& c : cases) {
    const AreInput in = averaged_are_input(transform_system(c.spec));
    const Matrix r = solve_stabilizing_are(in.A, in.D, in.C).R;
    const double gamma = c.spec.gamma;
    double worst_j = -1e300, worst_gain = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Disturbance d;
      d.kind = Disturbance::Kind::noise;
      d.duration = 20.0;
      d.seed = seed;
      const SimulationResult s =
          simulate(c.spec, ControlMode::saddle, constant_riccati(r), d, SimulationOptions{0.0, 0.01});
      worst_j = std::max(worst_j, s.J_value / s.w_energy);
      worst_gain = std::max(worst_gain, s.gain_estimate);
      v.require(s.J_value <= 1e-6 * s.w_energy, std::string(c.name) + " J seed " + std::to_string(seed));
      v.require(s.gain_estimate <= gamma + 0.01, std::string(c.name) + " gain seed " + std::to_string(seed));
    }
    Disturbance wc;
    wc.kind = Disturbance::Kind::worst_case;
    wc.duration = 1.0;
    const SimulationResult s =
        simulate(c.spec, ControlMode::saddle, constant_riccati(r), wc, SimulationOptions{0.0, 0.01});
    const double rel = std::abs(s.saddle_residual) / (gamma * gamma * s.w_energy);
    v.require(rel <= 1e-3, std::string(c.name) + " w* run");
    v.detail << " " << c.name << " (gamma=" << gamma << "): max J/|w|^2 = " << worst_j
             << ", max gain = " << worst_gain << ", w* run |J - J_exact|/(gamma^2|w|^2) = " << rel << ";";
  }
}

void criterion7(Verdict& v) {
  struct Suite {
    const char* name;
    props::Outcome (*fn)(int, std::uint64_t);
  };
  const Suite suites[] = {{"projector", props::projector_algebra},
                          {"antiderivative", props::antiderivative_roundtrip},
                          {"sylvester", props::sylvester_residuals},
                          {"are", props::are_residuals},
                          {"monotone", props::monotone_feasibility},
                          {"convention", props::convention_equivalence}};
  std::uint64_t seed = 7001;
  for (const Suite& s : suites) {
    const props::Outcome o = s.fn(200, seed++);
    v.require(o.ok(), std::string(s.name) + ": " + o.first_failure);
    v.detail << " " << s.name << " " << o.instances - o.failures << "/" << o.instances;
  }
}

}  // namespace

int main() {
  bool ok = true;
  ok &= run(1, "published gamma* table", 5.0, criterion1);
  ok &= run(2, "gamma* equals frequency-sweep H-infinity norm", 5.0, criterion2);
  ok &= run(3, "scalar analytic gamma* = 1/sqrt(2)", 0.0, criterion3);
  ok &= run(4, "series error and defect orders", 60.0, criterion4);
  ok &= run(5, "Floquet and definiteness certificates", 0.0, criterion5);
  ok &= run(6, "saddle point and gain bound in simulation", 0.0, criterion6);
  ok &= run(7, "randomized property suites (200 instances each, n <= 6)", 60.0, criterion7);
  std::printf("%s\n", ok ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL");
  return ok ? 0 : 1;
}
