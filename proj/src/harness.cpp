#include "hvib/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "hvib/error.hpp"
#include "hvib/matkit.hpp"

namespace hvib {

namespace {

constexpr double kBlowUp = 1e12;

void check_finite(const Matrix& m, const char* where) {
  if (!m.all_finite() || m.max_abs() > kBlowUp) {
    fail(ErrorKind::divergence, std::string(where) + ": integration blew up");
  }
}

std::size_t vech_size(std::size_t n) { return n * (n + 1) / 2; }

std::vector<double> vech(const Matrix& s) {
  std::vector<double> v;
  v.reserve(vech_size(s.rows()));
  for (std::size_t i = 0; i < s.rows(); ++i)
    for (std::size_t j = i; j < s.cols(); ++j) v.push_back(s(i, j));
  return v;
}

Matrix unvech(const std::vector<double>& v, std::size_t n) {
  Matrix s(n, n);
  std::size_t idx = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      s(i, j) = v[idx];
      s(j, i) = v[idx];
      ++idx;
    }
  return s;
}

double vnorm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Classical RK4 for the matrix ODE Y' = M(stage) Y over one period, with
// M supplied at the 2 * steps + 1 half-step points.
Matrix transition(const std::vector<Matrix>& field, std::size_t steps) {
  const double h = kTwoPi / static_cast<double>(steps);
  Matrix y = Matrix::identity(field.front().rows());
  for (std::size_t s = 0; s < steps; ++s) {
    const Matrix& m0 = field[2 * s];
    const Matrix& mh = field[2 * s + 1];
    const Matrix& m1 = field[2 * s + 2];
    const Matrix k1 = m0 * y;
    const Matrix k2 = mh * (y + (0.5 * h) * k1);
    const Matrix k3 = mh * (y + (0.5 * h) * k2);
    const Matrix k4 = m1 * (y + h * k3);
    Matrix incr = k1;
    incr.add_scaled(2.0, k2).add_scaled(2.0, k3) += k4;
    y.add_scaled(h / 6.0, incr);
    check_finite(y, "floquet");
  }
  return y;
}

// Closed-loop monodromy with P carried along the Riccati flow from p0.
double joint_floquet_radius(const CoefficientTable& table, const Matrix& p0, double eps) {
  const std::size_t steps = table.steps();
  const double h = table.step();
  Matrix p = p0;
  Matrix y = Matrix::identity(p0.rows());
  auto field = [&](const FastTimeCoefficients& co, const Matrix& pp) {
    return eps * (co.a - co.d * pp);
  };
  for (std::size_t s = 0; s < steps; ++s) {
    const auto& c0 = table.at_half_step(2 * s);
    const auto& ch = table.at_half_step(2 * s + 1);
    const auto& c1 = table.at_half_step(2 * s + 2);
    const Matrix kp1 = riccati_rhs(c0, p, eps);
    const Matrix ky1 = field(c0, p) * y;
    const Matrix p2 = p + (0.5 * h) * kp1;
    const Matrix kp2 = riccati_rhs(ch, p2, eps);
    const Matrix ky2 = field(ch, p2) * (y + (0.5 * h) * ky1);
    const Matrix p3 = p + (0.5 * h) * kp2;
    const Matrix kp3 = riccati_rhs(ch, p3, eps);
    const Matrix ky3 = field(ch, p3) * (y + (0.5 * h) * ky2);
    const Matrix p4 = p + h * kp3;
    const Matrix kp4 = riccati_rhs(c1, p4, eps);
    const Matrix ky4 = field(c1, p4) * (y + h * ky3);
    Matrix dp = kp1;
    dp.add_scaled(2.0, kp2).add_scaled(2.0, kp3) += kp4;
    Matrix dy = ky1;
    dy.add_scaled(2.0, ky2).add_scaled(2.0, ky3) += ky4;
    p.add_scaled(h / 6.0, dp);
    y.add_scaled(h / 6.0, dy);
    check_finite(y, "floquet");
  }
  return eigenvalues(y).spectral_radius;
}

}  // namespace

CoefficientTable::CoefficientTable(const AveragedSystem& avg, std::size_t steps)
    : steps_(steps) {
  if (steps == 0) fail(ErrorKind::precondition, "RK4 step count must be positive");
  table_.reserve(2 * steps + 1);
  for (std::size_t j = 0; j <= 2 * steps; ++j) {
    const double tau = 0.5 * kTwoPi * static_cast<double>(j) / static_cast<double>(steps);
    table_.push_back(coefficients_at(avg.spec, tau, avg.convention));
  }
}

Matrix riccati_rhs(const FastTimeCoefficients& co, const Matrix& p, double eps) {
  Matrix f = p * co.d * p;
  f -= co.a.transpose() * p;
  f -= p * co.a;
  f -= co.c;
  return symmetrize(f) * eps;
}

Matrix riccati_flow(const CoefficientTable& table, const Matrix& p0, double eps,
                    std::vector<Matrix>* samples, std::size_t grid) {
  const std::size_t steps = table.steps();
  std::size_t stride = 0;
  if (samples != nullptr) {
    if (grid == 0 || steps % grid != 0) {
      fail(ErrorKind::precondition, "RK4 steps must be a multiple of the grid size");
    }
    stride = steps / grid;
    samples->clear();
    samples->reserve(grid);
  }
  const double h = table.step();
  Matrix p = p0;
  for (std::size_t s = 0; s < steps; ++s) {
    if (samples != nullptr && s % stride == 0) samples->push_back(p);
    const Matrix k1 = riccati_rhs(table.at_half_step(2 * s), p, eps);
    const Matrix k2 = riccati_rhs(table.at_half_step(2 * s + 1), p + (0.5 * h) * k1, eps);
    const Matrix k3 = riccati_rhs(table.at_half_step(2 * s + 1), p + (0.5 * h) * k2, eps);
    const Matrix k4 = riccati_rhs(table.at_half_step(2 * s + 2), p + h * k3, eps);
    Matrix incr = k1;
    incr.add_scaled(2.0, k2).add_scaled(2.0, k3) += k4;
    p.add_scaled(h / 6.0, incr);
    check_finite(p, "riccati flow");
  }
  return symmetrize(p);
}

ReferenceSolution reference_solution(const AveragedSystem& avg, double eps,
                                     const Matrix& init, const ShootingOptions& options) {
  if (!(eps > 0.0)) fail(ErrorKind::precondition, "reference_solution: eps must be positive");
  const std::size_t n = avg.spec.n();
  if (init.rows() != n || init.cols() != n) {
    fail(ErrorKind::dimension, "reference_solution: init must be n x n");
  }
  const CoefficientTable table(avg, options.steps);
  const std::size_t m = vech_size(n);

  auto residual = [&](const Matrix& p) {
    const Matrix end = riccati_flow(table, p, eps);
    std::vector<double> r = vech(end);
    const std::vector<double> start = vech(p);
    for (std::size_t i = 0; i < m; ++i) r[i] -= start[i];
    return r;
  };

  auto stabilizing = [&](const Matrix& q) {
    try {
      return joint_floquet_radius(table, q, eps) < 1.0 - kFloquetStabilityMargin;
    } catch (const Error&) {
      return false;
    }
  };

  // A non-stabilizing start is pulled toward zero along its ray until it is
  // stabilizing. From then on steps are backtracked to stay stabilizing.
  Matrix p = symmetrize(init);
  bool guarded = stabilizing(p);
  for (double theta = 0.5; !guarded && theta > 1e-3; theta *= 0.5) {
    const Matrix shrunk = theta * symmetrize(init);
    if (stabilizing(shrunk)) {
      p = shrunk;
      guarded = true;
    }
  }
  std::vector<double> r = residual(p);
  double rn = vnorm(r);
  int it = 0;
  bool converged = false;
  for (; it <= options.max_newton; ++it) {
    const double scale = 1.0 + p.norm();
    if (rn <= 1e-12 * scale) {
      converged = true;
      break;
    }
    if (it == options.max_newton) break;
    const double h = 1e-7 * scale;
    Matrix jac(m, m);
    const std::vector<double> base = vech(p);
    for (std::size_t c = 0; c < m; ++c) {
      std::vector<double> shifted = base;
      shifted[c] += h;
      const std::vector<double> rc = residual(unvech(shifted, n));
      for (std::size_t i = 0; i < m; ++i) jac(i, c) = (rc[i] - r[i]) / h;
    }
    Matrix rhs(m, 1);
    for (std::size_t i = 0; i < m; ++i) rhs(i, 0) = -r[i];
    Matrix delta;
    try {
      delta = solve(jac, rhs);
    } catch (const Error&) {
      fail(ErrorKind::no_reference, "shooting Jacobian is singular");
    }
    bool accepted = false;
    double lambda = 1.0;
    for (int ls = 0; ls < 40 && !accepted && !converged; ++ls, lambda *= 0.5) {
      std::vector<double> trial = base;
      for (std::size_t i = 0; i < m; ++i) trial[i] += lambda * delta(i, 0);
      const Matrix candidate = unvech(trial, n);
      std::vector<double> rc;
      try {
        rc = residual(candidate);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::divergence) throw;
        continue;
      }
      const double rcn = vnorm(rc);
      if (ls == 0 && !(rcn < rn) && rn <= 1e-10 * scale) {
        converged = true;  // at the rounding floor
        break;
      }
      if (!(rcn < rn)) continue;
      const bool stable = stabilizing(candidate);
      if (guarded && !stable) continue;
      guarded = guarded || stable;
      p = candidate;
      r = std::move(rc);
      rn = rcn;
      accepted = true;
    }
    if (converged) break;
    if (!accepted) fail(ErrorKind::no_reference, "shooting line search failed");
  }
  if (!converged) {
    fail(ErrorKind::no_reference, "shooting Newton did not converge (residual " +
                                      std::to_string(rn) + ")");
  }

  ReferenceSolution out{PeriodicMatrix::constant(p, avg.grid_size(), kTwoPi, true), p, it,
                        rn, 0.0};
  std::vector<Matrix> samples;
  riccati_flow(table, p, eps, &samples, avg.grid_size());
  for (Matrix& s : samples) s = symmetrize(s);
  out.P = PeriodicMatrix(std::move(samples), kTwoPi, true);
  out.floquet_radius = joint_floquet_radius(table, p, eps);
  if (!(out.floquet_radius < 1.0 - kFloquetStabilityMargin)) {
    fail(ErrorKind::no_reference, "periodic orbit is not stabilizing (Floquet radius " +
                                      std::to_string(out.floquet_radius) + ")");
  }
  return out;
}

double defect(const ExpansionSeries& series, double eps) {
  const PeriodicMatrix p = series_on_grid(series, eps);
  const PeriodicMatrix dp = spectral_derivative(p);
  const AveragedSystem& avg = series.source;
  double worst = 0.0;
  for (std::size_t j = 0; j < p.grid_size(); ++j) {
    const FastTimeCoefficients co{avg.A_per[j], avg.D_per[j], avg.C_per[j], Matrix()};
    worst = std::max(worst, (dp[j] - riccati_rhs(co, p[j], eps)).norm());
  }
  return worst;
}

FloquetResult floquet(const SystemSpec& spec, const PeriodicMatrix& p, double eps,
                      FloquetForm form, PhaseConvention convention, std::size_t steps) {
  if (!(eps > 0.0)) fail(ErrorKind::precondition, "floquet: eps must be positive");
  if (p.rows() != spec.n() || p.cols() != spec.n()) {
    fail(ErrorKind::dimension, "floquet: Riccati solution must be n x n");
  }
  const std::vector<Matrix> p_half = sample_uniform(p, 2 * steps);
  const Matrix d = spec.D();
  std::vector<Matrix> field;
  field.reserve(2 * steps + 1);
  for (std::size_t j = 0; j <= 2 * steps; ++j) {
    const double tau = 0.5 * kTwoPi * static_cast<double>(j) / static_cast<double>(steps);
    const Matrix& pj = p_half[j % (2 * steps)];
    if (form == FloquetForm::original) {
      const Matrix ps = psi(spec.K, tau, convention);
      const Matrix r = ps * pj * ps.transpose();
      Matrix m = eps * spec.A;
      m.add_scaled(std::sin(tau), spec.K).add_scaled(-eps, d * r);
      field.push_back(std::move(m));
    } else {
      const FastTimeCoefficients co = coefficients_at(spec, tau, convention);
      field.push_back(eps * (co.a - co.d * pj));
    }
  }
  FloquetResult out;
  out.monodromy = transition(field, steps);
  out.radius = eigenvalues(out.monodromy).spectral_radius;
  out.stable = out.radius < 1.0 - kFloquetStabilityMargin;
  return out;
}

// --- simulation ---------------------------------------------------------------

RiccatiSource constant_riccati(const Matrix& r) {
  return [r](double) { return r; };
}

RiccatiSource series_riccati(const ExpansionSeries& series, double eps) {
  return [series, eps](double t) { return eval_series(series, eps, t, Coordinates::original_R); };
}

std::string to_string(Disturbance::Kind kind) {
  switch (kind) {
    case Disturbance::Kind::zero: return "zero";
    case Disturbance::Kind::bump: return "bump";
    case Disturbance::Kind::noise: return "noise";
    case Disturbance::Kind::worst_case: return "worst_case";
  }
  return "zero";
}

Disturbance::Kind parse_disturbance_kind(const std::string& s) {
  if (s == "zero") return Disturbance::Kind::zero;
  if (s == "bump") return Disturbance::Kind::bump;
  if (s == "noise") return Disturbance::Kind::noise;
  if (s == "worst_case") return Disturbance::Kind::worst_case;
  fail(ErrorKind::config, "unknown disturbance kind '" + s + "'");
}

double default_horizon(const SystemSpec& spec, const Matrix& r) {
  const Matrix acl = spec.A - spec.D() * r;
  const double re = eigenvalues(acl).max_real_part;
  if (!(re < 0.0)) fail(ErrorKind::precondition, "closed loop is not stable");
  return 40.0 / std::abs(re);
}

namespace {

class SignalGenerator {
 public:
  SignalGenerator(const Disturbance& d, std::size_t channels) : d_(d), channels_(channels) {
    if (d.kind == Disturbance::Kind::noise) {
      std::mt19937_64 rng(d.seed);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      std::normal_distribution<double> gauss(0.0, 1.0);
      const double norm = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(d.harmonics, 1)));
      for (std::size_t c = 0; c < channels; ++c) {
        for (std::size_t h = 0; h < d.harmonics; ++h) {
          freq_.push_back(d.cutoff * (1.0 - unit(rng)));
          phase_.push_back(kTwoPi * unit(rng));
          amp_.push_back(gauss(rng) * norm);
        }
      }
    }
  }

  /// True once the worst-case run hands over to w* feedback.
  bool feedback_at(double t) const {
    return d_.kind == Disturbance::Kind::worst_case && t >= d_.duration;
  }

  /// Open-loop part of w(t).
  std::vector<double> operator()(double t) const {
    std::vector<double> w(channels_, 0.0);
    const double window = (t >= 0.0 && t <= d_.duration)
                              ? std::pow(std::sin(std::numbers::pi * t / d_.duration), 2)
                              : 0.0;
    switch (d_.kind) {
      case Disturbance::Kind::zero:
        break;
      case Disturbance::Kind::bump:
        std::fill(w.begin(), w.end(), d_.amplitude * window);
        break;
      case Disturbance::Kind::worst_case:
        std::fill(w.begin(), w.end(), d_.amplitude * window);
        break;
      case Disturbance::Kind::noise:
        for (std::size_t c = 0; c < channels_; ++c) {
          double s = 0.0;
          for (std::size_t h = 0; h < d_.harmonics; ++h) {
            const std::size_t i = c * d_.harmonics + h;
            s += amp_[i] * std::sin(freq_[i] * t + phase_[i]);
          }
          w[c] = d_.amplitude * window * s;
        }
        break;
    }
    return w;
  }

 private:
  Disturbance d_;
  std::size_t channels_;
  std::vector<double> freq_, phase_, amp_;
};

Matrix column(const std::vector<double>& v) {
  Matrix m(v.size(), 1);
  for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
  return m;
}

std::vector<double> flat(const Matrix& m) { return {m.data().begin(), m.data().end()}; }

double sq(const Matrix& v) {
  double s = 0.0;
  for (double x : v.data()) s += x * x;
  return s;
}

}  // namespace

SimulationResult simulate(const SystemSpec& spec, ControlMode mode,
                          const std::optional<RiccatiSource>& riccati,
                          const Disturbance& disturbance, const SimulationOptions& options) {
  spec.validate();
  if (!(options.step > 0.0)) fail(ErrorKind::precondition, "simulate: step must be positive");
  if ((mode == ControlMode::saddle || disturbance.kind == Disturbance::Kind::worst_case) &&
      !riccati) {
    fail(ErrorKind::precondition, "simulate: feedback requires a Riccati source");
  }
  double horizon = options.horizon;
  if (!(horizon > 0.0)) {
    if (!riccati) fail(ErrorKind::precondition, "simulate: horizon must be positive");
    horizon = default_horizon(spec, (*riccati)(0.0));
  }
  const std::size_t steps =
      static_cast<std::size_t>(std::ceil(horizon / options.step - 1e-9));
  const double h = horizon / static_cast<double>(steps);
  const double g2 = spec.gamma * spec.gamma;
  const SignalGenerator signal(disturbance, spec.B2.cols());
  const Matrix b1t = spec.B1.transpose();
  const Matrix b2t = spec.B2.transpose();

  struct Inputs {
    Matrix u, w, u_star, w_star;
  };
  // `feedback` is fixed per step so one interval never mixes input laws.
  auto inputs = [&](double t, const Matrix& x, bool feedback) {
    Inputs in;
    in.w = column(signal(t));
    if (riccati) {
      const Matrix rx = (*riccati)(t) * x;
      in.u_star = -(b1t * rx);
      in.w_star = (b2t * rx) * (1.0 / g2);
    } else {
      in.u_star = Matrix(spec.B1.cols(), 1);
      in.w_star = Matrix(spec.B2.cols(), 1);
    }
    in.u = mode == ControlMode::saddle ? in.u_star : Matrix(spec.B1.cols(), 1);
    if (feedback) in.w = in.w_star;
    return in;
  };
  auto field = [&](double t, const Matrix& x, bool feedback) {
    const Inputs in = inputs(t, x, feedback);
    Matrix a = spec.A;
    if (spec.has_vibration()) a.add_scaled(std::sin(t / spec.epsilon) / spec.epsilon, spec.K);
    Matrix dx = a * x;
    dx += spec.B1 * in.u;
    dx += spec.B2 * in.w;
    return dx;
  };

  SimulationResult out;
  out.horizon = horizon;
  out.step = h;
  Matrix x(spec.n(), 1);
  struct Integrands {
    double j, z, u, w, du, dw;
  };
  auto integrands = [&](double t, const Matrix& xs, bool feedback) {
    const Inputs in = inputs(t, xs, feedback);
    const double ww = sq(in.w);
    return Integrands{sq(spec.L * xs) + sq(in.u) - g2 * ww, sq(spec.L * xs), sq(in.u), ww,
                      sq(in.u - in.u_star), sq(in.w - in.w_star)};
  };
  auto record = [&](double t, const Matrix& xs, bool feedback) {
    const Inputs in = inputs(t, xs, feedback);
    out.time.push_back(t);
    out.state.push_back(flat(xs));
    out.z.push_back(flat(spec.L * xs));
    out.u.push_back(flat(in.u));
    out.w.push_back(flat(in.w));
  };
  double du_energy = 0.0, dw_energy = 0.0;
  bool feedback = false;
  for (std::size_t s = 0; s < steps; ++s) {
    const double t = h * static_cast<double>(s);
    feedback = signal.feedback_at(t + 0.5 * h);
    record(t, x, feedback);
    const Integrands left = integrands(t, x, feedback);

    const Matrix k1 = field(t, x, feedback);
    const Matrix k2 = field(t + 0.5 * h, x + (0.5 * h) * k1, feedback);
    const Matrix k3 = field(t + 0.5 * h, x + (0.5 * h) * k2, feedback);
    const Matrix k4 = field(t + h, x + h * k3, feedback);
    Matrix incr = k1;
    incr.add_scaled(2.0, k2).add_scaled(2.0, k3) += k4;
    x.add_scaled(h / 6.0, incr);
    check_finite(x, "simulate");

    const Integrands right = integrands(t + h, x, feedback);
    out.J_value += 0.5 * h * (left.j + right.j);
    out.z_energy += 0.5 * h * (left.z + right.z);
    out.u_energy += 0.5 * h * (left.u + right.u);
    out.w_energy += 0.5 * h * (left.w + right.w);
    du_energy += 0.5 * h * (left.du + right.du);
    dw_energy += 0.5 * h * (left.dw + right.dw);
  }
  record(horizon, x, feedback);
  out.gain_estimate = out.w_energy > 0.0 ? std::sqrt(out.z_energy / out.w_energy) : 0.0;
  if (riccati) {
    const Matrix terminal = x.transpose() * (*riccati)(horizon) * x;
    out.saddle_residual = out.J_value - (du_energy - g2 * dw_energy - terminal(0, 0));
  } else {
    out.saddle_residual = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

// --- convergence / certification -----------------------------------------------

namespace {

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

VerificationReport verify(const AveragedSystem& avg, std::span<const double> eps_list,
                          std::size_t order, const VerifyOptions& options) {
  for (std::size_t i = 0; i + 1 < eps_list.size(); ++i) {
    if (!(eps_list[i + 1] < eps_list[i])) {
      fail(ErrorKind::precondition, "epsilon list must be strictly decreasing");
    }
  }
  const ExpansionSeries series = build_series(avg, order);
  VerificationReport rep;
  rep.order = order;
  for (double eps : eps_list) {
    EpsilonRecord rec;
    rec.epsilon = eps;
    const PeriodicMatrix approx = series_on_grid(series, eps);
    rec.defect_sup = defect(series, eps);
    rec.positive_definite_ok = std::all_of(
        approx.samples().begin(), approx.samples().end(),
        [](const Matrix& s) { return definiteness(s) == Definiteness::positive_definite; });
    rec.floquet_radius =
        floquet(avg.spec, approx, eps, FloquetForm::transformed, avg.convention,
                options.shooting.steps)
            .radius;
    try {
      const ReferenceSolution ref = reference_solution(
          avg, eps, eval_series(series, eps, 0.0, Coordinates::fast_P), options.shooting);
      rec.reference_ok = true;
      rec.newton_iterations = ref.newton_iterations;
      rec.series_error_sup = sup_distance(ref.P, approx);
    } catch (const Error& e) {
      if (options.strict) throw;
      rec.reference_ok = false;
      rec.failure = std::string(to_string(e.kind())) + ": " + e.what();
      rec.series_error_sup = std::numeric_limits<double>::quiet_NaN();
    }
    rep.records.push_back(std::move(rec));
  }

  std::vector<double> lx, ld, le;
  for (const EpsilonRecord& r : rep.records) {
    if (!r.reference_ok) continue;
    lx.push_back(std::log2(r.epsilon));
    ld.push_back(std::log2(std::max(r.defect_sup, 1e-300)));
    le.push_back(std::log2(std::max(r.series_error_sup, 1e-300)));
  }
  for (std::size_t i = 0; i + 1 < lx.size(); ++i) {
    const double dx = lx[i] - lx[i + 1];
    rep.defect_slopes.push_back((ld[i] - ld[i + 1]) / dx);
    rep.error_slopes.push_back((le[i] - le[i + 1]) / dx);
  }
  const bool any_ok = !lx.empty();
  rep.exact_regime = any_ok && std::all_of(rep.records.begin(), rep.records.end(), [](const EpsilonRecord& r) {
                       return !r.reference_ok || (r.series_error_sup <= 1e-10 && r.defect_sup <= 1e-10);
                     });
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (rep.exact_regime || lx.size() < 2) {
    rep.defect_order = nan;
    rep.error_order = nan;
  } else {
    rep.defect_order = fit_slope(lx, ld);
    rep.error_order = fit_slope(lx, le);
  }
  for (const EpsilonRecord& r : rep.records) {
    if (r.reference_ok && r.positive_definite_ok &&
        r.floquet_radius < 1.0 - kFloquetStabilityMargin) {
      rep.epsilon_star = std::max(rep.epsilon_star.value_or(0.0), r.epsilon);
    }
  }
  rep.certified = rep.exact_regime ||
                  (std::isfinite(rep.error_order) &&
                   rep.error_order > static_cast<double>(order) + 0.5);
  return rep;
}

VerificationReport convergence_order(const AveragedSystem& avg,
                                     std::span<const double> eps_list, std::size_t order,
                                     const ShootingOptions& shooting) {
  if (eps_list.size() < 3) fail(ErrorKind::precondition, "need at least three epsilons");
  for (std::size_t i = 0; i + 1 < eps_list.size(); ++i) {
    if (std::abs(eps_list[i] / eps_list[i + 1] - 2.0) > 1e-12) {
      fail(ErrorKind::precondition, "epsilon list must be dyadic");
    }
  }
  return verify(avg, eps_list, order, VerifyOptions{shooting, true});
}

}  // namespace hvib
