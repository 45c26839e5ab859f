#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hvib/error.hpp"
#include "hvib/io.hpp"
#include "hvib/kernels.hpp"

namespace hvib::io {

namespace {

std::string localize(std::string s, const FormatOptions& fmt) {
  if (fmt.paper_format) {
    for (char& c : s) {
      if (c == '.') c = ',';
    }
  }
  return s;
}

std::string num(double v, const FormatOptions& fmt) { return format_number(v, fmt); }

std::string idx(std::size_t i) { return std::to_string(i); }

void append_matrix(Table& t, const std::string& name, const Matrix& m, const FormatOptions& fmt) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      t.rows.push_back({name, idx(m.rows()), idx(m.cols()), idx(i), idx(j), num(m(i, j), fmt)});
    }
}

}  // namespace

std::string format_number(double v, const FormatOptions& fmt) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // drop negative zero
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", fmt.digits, v);
  return localize(buf, fmt);
}

std::string format_fixed(double v, int decimals, const FormatOptions& fmt) {
  if (!std::isfinite(v)) return format_number(v, fmt);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s = buf;
  if (s.rfind("-0.", 0) == 0 && std::stod(s) == 0.0) s.erase(0, 1);
  return localize(s, fmt);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string Table::to_csv() const {
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os << ',';
      os << csv_field(cells[i]);
    }
    os << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return os.str();
}

void Meta::add(const std::string& key, const std::string& value) {
  entries.emplace_back(key, value);
}

std::string Meta::to_text() const {
  std::ostringstream os;
  for (const auto& [k, v] : entries) os << k << ": " << v << '\n';
  return os.str();
}

Meta base_meta(const RunConfig& cfg, const std::string& command, const FormatOptions& fmt) {
  const FormatOptions plain{fmt.digits, false};
  Meta m;
  m.add("command", command);
  m.add("version", kVersion);
  m.add("config_hash", fnv1a_hex(cfg.canonical));
  m.add("convention", std::string(to_string(cfg.convention)));
  m.add("grid_size", std::to_string(cfg.grid_size));
  m.add("bisection_tol", format_number(cfg.bisection.tol, plain));
  m.add("gamma_max", format_number(cfg.bisection.gamma_max, plain));
  m.add("symmetry_tol", format_number(kSymmetryTolerance, plain));
  m.add("rk4_steps", std::to_string(kDefaultRk4Steps));
  m.add("digits", std::to_string(fmt.digits));
  m.add("decimal_separator", fmt.paper_format ? "comma" : "point");
  m.add("kernel_backend", std::string(kernels::to_string(kernels::active())));
  return m;
}

void write_output(const std::filesystem::path& dir, const std::string& stem, const Table& table,
                  const Meta& meta) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::io, "cannot create output directory '" + dir.string() + "'");
  auto put = [&](const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << text;
    out.close();
    if (!out) fail(ErrorKind::io, "cannot write '" + p.string() + "'");
  };
  put(dir / (stem + ".csv"), table.to_csv());
  put(dir / (stem + ".meta"), meta.to_text());
}

Table gamma_table(const GammaResult& r, const FormatOptions& fmt) {
  Table t;
  t.header = {"gamma_star", "gamma_lo", "gamma_hi", "tolerance", "evaluations"};
  t.rows.push_back({num(r.gamma_star, fmt), num(r.gamma_lo, fmt), num(r.gamma_hi, fmt),
                    num(r.tolerance, fmt), std::to_string(r.evaluations)});
  return t;
}

Table matrix_table(const std::vector<std::pair<std::string, Matrix>>& mats,
                   const FormatOptions& fmt) {
  Table t;
  t.header = {"name", "rows", "cols", "i", "j", "value"};
  for (const auto& [name, m] : mats) append_matrix(t, name, m, fmt);
  return t;
}

Table average_table(const AveragedSystem& avg, const FormatOptions& fmt) {
  return matrix_table({{"A_bar", avg.A_bar},
                       {"D_bar", avg.D_bar},
                       {"C_bar", avg.C_bar},
                       {"D_control_bar", avg.D_control_bar},
                       {"D_disturbance_bar", avg.D_disturbance_bar}},
                      fmt);
}

Table series_constants_table(const ExpansionSeries& s, const FormatOptions& fmt) {
  std::vector<std::pair<std::string, Matrix>> mats;
  for (std::size_t k = 0; k < s.constants.size(); ++k) {
    mats.emplace_back("R" + std::to_string(k), s.constants[k]);
  }
  return matrix_table(mats, fmt);
}

Table series_periodics_table(const ExpansionSeries& s, const FormatOptions& fmt) {
  Table t;
  t.header = {"name", "node", "tau", "rows", "cols", "i", "j", "value"};
  double scale = 1.0;
  for (const Matrix& c : s.constants) scale = std::max(scale, c.max_abs());
  for (std::size_t k = 0; k < s.periodics.size(); ++k) {
    const PeriodicMatrix& p = s.periodics[k];
    if (p.sup_norm() <= 1e-14 * scale) continue;
    const std::string name = "Pi" + std::to_string(k + 1);
    for (std::size_t node = 0; node < p.grid_size(); ++node) {
      const Matrix& m = p[node];
      for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) {
          t.rows.push_back({name, idx(node), num(p.node(node), fmt), idx(m.rows()), idx(m.cols()),
                            idx(i), idx(j), num(m(i, j), fmt)});
        }
    }
  }
  return t;
}

Table verification_table(const VerificationReport& r, const FormatOptions& fmt) {
  Table t;
  t.header = {"epsilon",        "reference_ok",         "defect_sup",        "series_error_sup",
              "floquet_radius", "positive_definite_ok", "newton_iterations", "failure"};
  for (const EpsilonRecord& e : r.records) {
    t.rows.push_back({num(e.epsilon, fmt), e.reference_ok ? "1" : "0", num(e.defect_sup, fmt),
                      num(e.series_error_sup, fmt), num(e.floquet_radius, fmt),
                      e.positive_definite_ok ? "1" : "0", std::to_string(e.newton_iterations),
                      e.failure});
  }
  return t;
}

void add_verification_meta(Meta& meta, const VerificationReport& r, const FormatOptions& fmt) {
  auto list = [&](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + num(v[i], fmt);
    return s;
  };
  meta.add("order", std::to_string(r.order));
  meta.add("defect_slopes", list(r.defect_slopes));
  meta.add("error_slopes", list(r.error_slopes));
  meta.add("defect_order", num(r.defect_order, fmt));
  meta.add("error_order", num(r.error_order, fmt));
  meta.add("exact_regime", r.exact_regime ? "true" : "false");
  meta.add("epsilon_star", r.epsilon_star ? num(*r.epsilon_star, fmt) : "none");
  meta.add("certified", r.certified ? "true" : "false");
}

Table simulation_table(const SimulationResult& r, const FormatOptions& fmt) {
  Table t;
  t.header = {"t"};
  auto cols = [&](const std::vector<std::vector<double>>& v, const char* prefix) {
    const std::size_t width = v.empty() ? 0 : v.front().size();
    for (std::size_t i = 0; i < width; ++i) t.header.push_back(prefix + std::to_string(i + 1));
  };
  cols(r.state, "x");
  cols(r.z, "z");
  cols(r.u, "u");
  cols(r.w, "w");
  for (std::size_t k = 0; k < r.time.size(); ++k) {
    std::vector<std::string> row{num(r.time[k], fmt)};
    for (const auto* v : {&r.state, &r.z, &r.u, &r.w}) {
      for (double x : (*v)[k]) row.push_back(num(x, fmt));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

void add_simulation_meta(Meta& meta, const SimulationResult& r, const FormatOptions& fmt) {
  meta.add("states", std::to_string(r.state.empty() ? 0 : r.state.front().size()));
  meta.add("outputs", std::to_string(r.z.empty() ? 0 : r.z.front().size()));
  meta.add("controls", std::to_string(r.u.empty() ? 0 : r.u.front().size()));
  meta.add("disturbances", std::to_string(r.w.empty() ? 0 : r.w.front().size()));
  meta.add("horizon", num(r.horizon, fmt));
  meta.add("step", num(r.step, fmt));
  meta.add("J_value", num(r.J_value, fmt));
  meta.add("z_energy", num(r.z_energy, fmt));
  meta.add("u_energy", num(r.u_energy, fmt));
  meta.add("w_energy", num(r.w_energy, fmt));
  meta.add("gain_estimate", num(r.gain_estimate, fmt));
  meta.add("saddle_residual", num(r.saddle_residual, fmt));
}

Table paper_table_csv(const std::vector<PaperTableRow>& rows, const FormatOptions& fmt) {
  Table t;
  t.header = {"k", "gamma_fixture", "gamma_pipeline"};
  for (const PaperTableRow& r : rows) {
    t.rows.push_back({format_fixed(r.k, 3, fmt), format_fixed(r.gamma_fixture, 3, fmt),
                      format_fixed(r.gamma_pipeline, 3, fmt)});
  }
  return t;
}

// --- readers ------------------------------------------------------------------

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string cell;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(cell));
      cell.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !cell.empty()) {
        row.push_back(std::move(cell));
        rows.push_back(std::move(row));
      }
      row.clear();
      cell.clear();
      any = false;
    } else {
      cell += c;
      any = true;
    }
  }
  if (quoted) fail(ErrorKind::io, "unterminated quoted CSV field");
  if (any || !cell.empty()) {
    row.push_back(std::move(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::pair<std::string, std::string>> parse_meta(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    const auto pos = line.find(": ");
    if (pos == std::string::npos) continue;
    out.emplace_back(line.substr(0, pos), line.substr(pos + 2));
  }
  return out;
}

SimulationResult read_simulation(const std::filesystem::path& csv_path,
                                 const std::filesystem::path& meta_path) {
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) fail(ErrorKind::io, "cannot read '" + p.string() + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
  };
  const auto meta = parse_meta(slurp(meta_path));
  auto get = [&](const std::string& key) -> std::string {
    for (const auto& [k, v] : meta) {
      if (k == key) return v;
    }
    fail(ErrorKind::io, "metadata key '" + key + "' missing");
  };
  auto to_d = [](const std::string& s) {
    try {
      return std::stod(s);
    } catch (const std::exception&) {
      fail(ErrorKind::io, "bad number '" + s + "'");
    }
  };
  SimulationResult r;
  const std::size_t nx = std::stoul(get("states")), nz = std::stoul(get("outputs")),
                    nu = std::stoul(get("controls")), nw = std::stoul(get("disturbances"));
  r.horizon = to_d(get("horizon"));
  r.step = to_d(get("step"));
  r.J_value = to_d(get("J_value"));
  r.z_energy = to_d(get("z_energy"));
  r.u_energy = to_d(get("u_energy"));
  r.w_energy = to_d(get("w_energy"));
  r.gain_estimate = to_d(get("gain_estimate"));
  r.saddle_residual = to_d(get("saddle_residual"));

  const auto rows = parse_csv(slurp(csv_path));
  if (rows.empty() || rows.front().size() != 1 + nx + nz + nu + nw) {
    fail(ErrorKind::io, "simulation table header does not match metadata");
  }
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const auto& row = rows[k];
    if (row.size() != rows.front().size()) fail(ErrorKind::io, "ragged simulation table");
    std::size_t c = 0;
    r.time.push_back(to_d(row[c++]));
    auto take = [&](std::size_t width) {
      std::vector<double> v;
      for (std::size_t i = 0; i < width; ++i) v.push_back(to_d(row[c++]));
      return v;
    };
    r.state.push_back(take(nx));
    r.z.push_back(take(nz));
    r.u.push_back(take(nu));
    r.w.push_back(take(nw));
  }
  return r;
}

}  // namespace hvib::io
