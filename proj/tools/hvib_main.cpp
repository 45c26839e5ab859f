// hvib: command-line front end for the averaged H-infinity pipeline.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hvib/error.hpp"
#include "hvib/harness.hpp"
#include "hvib/hinf.hpp"
#include "hvib/io.hpp"
#include "hvib/kernels.hpp"
#include "hvib/riccati.hpp"

namespace {

using namespace hvib;
namespace fs = std::filesystem;

struct Overrides {
  std::string config;
  std::optional<double> gamma, epsilon, tol, gamma_max;
  std::optional<std::size_t> order, grid;
  std::optional<std::string> convention, output, backend;
  std::optional<std::uint64_t> seed;
  int digits = 6;
  bool paper_format = false;
};

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::infeasible:
    case ErrorKind::unattainable:
      return 1;
    case ErrorKind::config:
      return 3;
    default:
      return 2;
  }
}

io::RunConfig load(const Overrides& o, bool config_required) {
  io::RunConfig cfg;
  if (!o.config.empty()) {
    cfg = io::load_config(o.config);
  } else if (config_required) {
    fail(ErrorKind::config, "a config file is required (--config)");
  }
  if (o.gamma) {
    if (!(*o.gamma > 0.0)) fail(ErrorKind::config, "--gamma must be positive");
    cfg.spec.gamma = *o.gamma;
    cfg.gamma_given = true;
  }
  if (o.epsilon) {
    if (!(*o.epsilon > 0.0)) fail(ErrorKind::config, "--epsilon must be positive");
    cfg.spec.epsilon = *o.epsilon;
    cfg.epsilon_given = true;
  }
  if (o.tol) {
    if (!(*o.tol > 0.0)) fail(ErrorKind::config, "--tol must be positive");
    cfg.bisection.tol = *o.tol;
  }
  if (o.gamma_max) {
    if (!(*o.gamma_max > 0.0)) fail(ErrorKind::config, "--gamma-max must be positive");
    cfg.bisection.gamma_max = *o.gamma_max;
  }
  if (o.order) {
    if (*o.order > kMaxSeriesOrder) fail(ErrorKind::config, "--order too large");
    cfg.order = *o.order;
  }
  if (o.grid) {
    if (*o.grid < kMinGridSize || *o.grid % 2 || kDefaultRk4Steps % *o.grid) {
      fail(ErrorKind::config, "--grid must be an even divisor of 4096 and at least 16");
    }
    cfg.grid_size = *o.grid;
  }
  if (o.convention) cfg.convention = parse_convention(*o.convention);
  if (o.seed) {
    cfg.seed = *o.seed;
    cfg.simulation.disturbance.seed = *o.seed;
  }
  if (o.digits < 1 || o.digits > 17) fail(ErrorKind::config, "--digits must be in 1..17");
  if (o.backend) {
    if (*o.backend == "scalar") {
      kernels::select(kernels::Backend::scalar);
    } else if (*o.backend == "avx2") {
      if (!kernels::available(kernels::Backend::avx2)) {
        fail(ErrorKind::config, "avx2 backend is not available on this machine");
      }
      kernels::select(kernels::Backend::avx2);
    } else {
      fail(ErrorKind::config, "--backend must be scalar or avx2");
    }
  }
  // Record overrides in the hash so outputs stay traceable.
  cfg.canonical += "|gamma=" + std::to_string(cfg.spec.gamma) +
                   "|eps=" + std::to_string(cfg.spec.epsilon) +
                   "|tol=" + std::to_string(cfg.bisection.tol) +
                   "|order=" + std::to_string(cfg.order) +
                   "|grid=" + std::to_string(cfg.grid_size) +
                   "|conv=" + std::string(to_string(cfg.convention)) +
                   "|seed=" + std::to_string(cfg.seed);
  return cfg;
}

fs::path output_dir(const Overrides& o, const io::RunConfig& cfg) {
  if (o.output) return *o.output;
  if (const char* env = std::getenv(io::kOutputDirEnv); env != nullptr && *env) return env;
  if (!cfg.output_path.empty()) return cfg.output_path;
  return ".";
}

io::FormatOptions format(const Overrides& o) { return {o.digits, o.paper_format}; }

void require_gamma(const io::RunConfig& cfg) {
  if (!cfg.gamma_given) fail(ErrorKind::config, "this command needs 'gamma' (config or --gamma)");
}

void require_feasible(const AveragedSystem& avg) {
  const AreInput in = averaged_are_input(avg);
  const FeasibilityResult f = is_feasible(in.A, in.D, in.C);
  if (!f.feasible) {
    fail(ErrorKind::infeasible, "gamma = " + std::to_string(avg.gamma()) +
                                    " is infeasible for the averaged problem: " + f.reason);
  }
}

void note(const std::string& s) { std::cerr << "hvib: " << s << '\n'; }

int cmd_gamma_star(const Overrides& o) {
  const io::RunConfig cfg = load(o, true);
  const io::FormatOptions fmt = format(o);
  const AveragedSystem avg = transform_system(cfg.spec, cfg.grid_size, cfg.convention);
  const GammaResult r = gamma_star(GammaProblem::from_averaged(avg), cfg.bisection);
  io::Meta meta = io::base_meta(cfg, "gamma-star", fmt);
  meta.add("evaluations", std::to_string(r.evaluations));
  io::write_output(output_dir(o, cfg), "gamma_star", io::gamma_table(r, fmt), meta);
  std::cout << io::format_number(r.gamma_star, fmt) << '\n';
  return 0;
}

int cmd_average(const Overrides& o) {
  const io::RunConfig cfg = load(o, true);
  const io::FormatOptions fmt = format(o);
  const AveragedSystem avg = transform_system(cfg.spec, cfg.grid_size, cfg.convention);
  io::Meta meta = io::base_meta(cfg, "average", fmt);
  io::Table table;
  if (cfg.gamma_given) {
    meta.add("gamma", io::format_number(cfg.spec.gamma, fmt));
    table = io::average_table(avg, fmt);
  } else {
    meta.add("gamma", "none");
    table = io::matrix_table({{"A_bar", avg.A_bar},
                              {"C_bar", avg.C_bar},
                              {"D_control_bar", avg.D_control_bar},
                              {"D_disturbance_bar", avg.D_disturbance_bar}},
                             fmt);
  }
  io::write_output(output_dir(o, cfg), "average", table, meta);
  return 0;
}

int cmd_expand(const Overrides& o) {
  const io::RunConfig cfg = load(o, true);
  require_gamma(cfg);
  const io::FormatOptions fmt = format(o);
  const AveragedSystem avg = transform_system(cfg.spec, cfg.grid_size, cfg.convention);
  require_feasible(avg);
  const ExpansionSeries s = build_series(avg, cfg.order);
  io::Meta meta = io::base_meta(cfg, "expand", fmt);
  meta.add("gamma", io::format_number(cfg.spec.gamma, fmt));
  meta.add("order", std::to_string(cfg.order));
  meta.add("r0_residual", io::format_number(s.r0_certificate.residual_norm, fmt));
  const fs::path dir = output_dir(o, cfg);
  io::write_output(dir, "series_constants", io::series_constants_table(s, fmt), meta);
  io::write_output(dir, "series_periodics", io::series_periodics_table(s, fmt), meta);
  return 0;
}

int cmd_verify(const Overrides& o) {
  const io::RunConfig cfg = load(o, true);
  require_gamma(cfg);
  const io::FormatOptions fmt = format(o);
  const AveragedSystem avg = transform_system(cfg.spec, cfg.grid_size, cfg.convention);
  require_feasible(avg);
  const VerificationReport r = verify(avg, cfg.epsilon_list, cfg.order);
  io::Meta meta = io::base_meta(cfg, "verify", fmt);
  meta.add("gamma", io::format_number(cfg.spec.gamma, fmt));
  io::add_verification_meta(meta, r, fmt);
  io::write_output(output_dir(o, cfg), "verify", io::verification_table(r, fmt), meta);
  for (const EpsilonRecord& e : r.records) {
    if (!e.reference_ok) note("eps = " + io::format_number(e.epsilon, fmt) + ": " + e.failure);
  }
  std::cout << "error_order " << io::format_number(r.error_order, fmt) << ", defect_order "
            << io::format_number(r.defect_order, fmt) << ", certified "
            << (r.certified ? "yes" : "no") << '\n';
  return 0;
}

int cmd_simulate(const Overrides& o) {
  const io::RunConfig cfg = load(o, true);
  require_gamma(cfg);
  const io::FormatOptions fmt = format(o);
  const AveragedSystem avg = transform_system(cfg.spec, cfg.grid_size, cfg.convention);
  require_feasible(avg);
  RiccatiSource source;
  if (cfg.spec.has_vibration()) {
    source = series_riccati(build_series(avg, cfg.order), cfg.spec.epsilon);
    if (cfg.simulation.step > kTwoPi * cfg.spec.epsilon / 64.0) {
      note("step does not resolve the vibration period; consider step <= 2*pi*eps/64");
    }
  } else {
    const AreInput in = averaged_are_input(avg);
    source = constant_riccati(solve_stabilizing_are(in.A, in.D, in.C).R);
  }
  const SimulationResult r =
      simulate(cfg.spec, cfg.simulation.mode, source, cfg.simulation.disturbance,
               SimulationOptions{cfg.simulation.horizon, cfg.simulation.step});
  io::Meta meta = io::base_meta(cfg, "simulate", fmt);
  meta.add("gamma", io::format_number(cfg.spec.gamma, fmt));
  meta.add("epsilon", io::format_number(cfg.spec.epsilon, fmt));
  meta.add("disturbance", to_string(cfg.simulation.disturbance.kind));
  meta.add("seed", std::to_string(cfg.simulation.disturbance.seed));
  io::add_simulation_meta(meta, r, fmt);
  io::write_output(output_dir(o, cfg), "simulation", io::simulation_table(r, fmt), meta);
  std::cout << "J " << io::format_number(r.J_value, fmt) << ", gain "
            << io::format_number(r.gain_estimate, fmt) << '\n';
  return 0;
}

int cmd_paper_table(const Overrides& o) {
  const io::RunConfig cfg = load(o, false);
  const io::FormatOptions fmt = format(o);
  PaperTableOptions opts;
  opts.tol = cfg.bisection.tol;
  opts.grid_size = cfg.grid_size;
  opts.convention = cfg.convention;
  const std::vector<double> ks = default_table_k_values();
  const std::vector<PaperTableRow> rows = paper_table(ks, opts);
  io::Meta meta = io::base_meta(cfg, "paper-table", fmt);
  const io::FormatOptions plain{fmt.digits, false};
  std::string flagged;
  for (const PaperTableRow& r : rows) {
    if (!r.flagged) continue;
    const std::string msg = "k=" + io::format_fixed(r.k, 2, plain) + " published " +
                            io::format_fixed(*r.published, 3, plain) + " vs fixture " +
                            io::format_fixed(r.gamma_fixture, 3, plain);
    note("discrepancy: " + msg);
    flagged += (flagged.empty() ? "" : "; ") + msg;
  }
  meta.add("published_discrepancies", flagged.empty() ? "none" : flagged);
  const io::Table table = io::paper_table_csv(rows, fmt);
  io::write_output(output_dir(o, cfg), "paper_table", table, meta);
  std::cout << table.to_csv();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Averaged H-infinity control under high-frequency vibration"};
  app.set_version_flag("--version", std::string(io::kVersion));
  app.require_subcommand(1);
  Overrides o;

  auto common = [&](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("-c,--config", o.config, "JSON run configuration");
    if (config_required) c->required();
    sub->add_option("--gamma", o.gamma, "attenuation level");
    sub->add_option("--epsilon", o.epsilon, "vibration small parameter");
    sub->add_option("--tol", o.tol, "bisection tolerance on gamma");
    sub->add_option("--gamma-max", o.gamma_max, "bisection upper bound");
    sub->add_option("--order", o.order, "series order N");
    sub->add_option("--grid", o.grid, "fast-time grid size");
    sub->add_option("--convention", o.convention, "phase convention: paper | zero_mean");
    sub->add_option("--seed", o.seed, "disturbance seed");
    sub->add_option("-o,--output", o.output, "output directory");
    sub->add_option("--digits", o.digits, "significant digits in CSV output");
    sub->add_flag("--paper-format", o.paper_format, "comma decimal separator");
    sub->add_option("--backend", o.backend, "kernel backend: scalar | avx2");
  };

  struct Cmd {
    const char* name;
    const char* help;
    bool config_required;
    int (*run)(const Overrides&);
  };
  const Cmd cmds[] = {
      {"gamma-star", "optimal attenuation level of the averaged problem", true, cmd_gamma_star},
      {"average", "averaged coefficient matrices", true, cmd_average},
      {"expand", "asymptotic series coefficients", true, cmd_expand},
      {"verify", "series verification against a shooting reference", true, cmd_verify},
      {"simulate", "time-domain simulation of the game functional", true, cmd_simulate},
      {"paper-table", "gamma* table for the example plant", false, cmd_paper_table},
  };
  int (*chosen)(const Overrides&) = nullptr;
  for (const Cmd& c : cmds) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    common(sub, c.config_required);
    sub->callback([&chosen, run = c.run] { chosen = run; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }
  try {
    return chosen(o);
  } catch (const Error& e) {
    std::cerr << "hvib: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "hvib: internal error: " << e.what() << '\n';
    return 2;
  }
}
