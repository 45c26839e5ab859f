#pragma once

// Run configuration and machine-readable output for the command-line tool:
// JSON config parsing, CSV tables with a key:value metadata sidecar, and a
// reader for simulation tables.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hvib/expansion.hpp"
#include "hvib/harness.hpp"
#include "hvib/hinf.hpp"
#include "hvib/vibration.hpp"

namespace hvib::io {

inline constexpr const char* kVersion = "0.3.0";
inline constexpr const char* kOutputDirEnv = "HVIB_OUTPUT_DIR";

struct SimulationConfig {
  double horizon = 0.0;  // 0 selects the default horizon
  double step = 1e-2;
  ControlMode mode = ControlMode::saddle;
  Disturbance disturbance;
};

struct RunConfig {
  SystemSpec spec;
  bool gamma_given = false;
  std::size_t order = 2;
  std::size_t grid_size = kDefaultGridSize;
  bool epsilon_given = false;
  std::vector<double> epsilon_list;
  PhaseConvention convention = PhaseConvention::paper;
  GammaOptions bisection;
  std::uint64_t seed = 0;
  std::string output_path;
  SimulationConfig simulation;
  std::string canonical;  // compact JSON dump used for the config hash
};

/// Parses and validates a config document. Throws ErrorKind::config.
RunConfig parse_config(const nlohmann::json& doc);
/// Reads a JSON file; a missing or malformed file is a config error.
RunConfig load_config(const std::filesystem::path& path);

/// 64-bit FNV-1a, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view text);

struct FormatOptions {
  int digits = 6;
  bool paper_format = false;  // comma decimal separator
};

std::string format_number(double v, const FormatOptions& fmt);
std::string format_fixed(double v, int decimals, const FormatOptions& fmt);
/// RFC 4180 field quoting.
std::string csv_field(const std::string& s);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::string to_csv() const;
};

struct Meta {
  std::vector<std::pair<std::string, std::string>> entries;
  void add(const std::string& key, const std::string& value);
  std::string to_text() const;
};

/// Common sidecar fields: version, config hash, convention, grid and tolerances.
Meta base_meta(const RunConfig& cfg, const std::string& command, const FormatOptions& fmt);

/// Writes `<dir>/<stem>.csv` and `<dir>/<stem>.meta`. Throws ErrorKind::io.
void write_output(const std::filesystem::path& dir, const std::string& stem, const Table& table,
                  const Meta& meta);

// --- serializers --------------------------------------------------------------

Table gamma_table(const GammaResult& r, const FormatOptions& fmt);
/// Long format: name,rows,cols,i,j,value.
Table matrix_table(const std::vector<std::pair<std::string, Matrix>>& mats,
                   const FormatOptions& fmt);
Table average_table(const AveragedSystem& avg, const FormatOptions& fmt);
Table series_constants_table(const ExpansionSeries& s, const FormatOptions& fmt);
/// name,node,tau,rows,cols,i,j,value; periodic terms that vanish are omitted.
Table series_periodics_table(const ExpansionSeries& s, const FormatOptions& fmt);
Table verification_table(const VerificationReport& r, const FormatOptions& fmt);
void add_verification_meta(Meta& meta, const VerificationReport& r, const FormatOptions& fmt);
Table simulation_table(const SimulationResult& r, const FormatOptions& fmt);
void add_simulation_meta(Meta& meta, const SimulationResult& r, const FormatOptions& fmt);
Table paper_table_csv(const std::vector<PaperTableRow>& rows, const FormatOptions& fmt);

// --- readers ------------------------------------------------------------------

std::vector<std::vector<std::string>> parse_csv(const std::string& text);
std::vector<std::pair<std::string, std::string>> parse_meta(const std::string& text);
/// Rebuilds a SimulationResult from the CSV table and sidecar written above
/// (decimal point format only).
SimulationResult read_simulation(const std::filesystem::path& csv_path,
                                 const std::filesystem::path& meta_path);

}  // namespace hvib::io
