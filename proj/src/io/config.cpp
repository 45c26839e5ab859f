#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "hvib/error.hpp"
#include "hvib/io.hpp"

namespace hvib::io {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& msg) { fail(ErrorKind::config, msg); }

double number(const json& v, const std::string& key) {
  if (!v.is_number()) bad("'" + key + "' must be a number");
  return v.get<double>();
}

double positive(const json& v, const std::string& key) {
  const double x = number(v, key);
  if (!(x > 0.0) || !std::isfinite(x)) bad("'" + key + "' must be positive");
  return x;
}

std::size_t count(const json& v, const std::string& key) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    bad("'" + key + "' must be a non-negative integer");
  }
  return static_cast<std::size_t>(v.get<long long>());
}

Matrix matrix(const json& v, const std::string& key, std::size_t rows_if_empty) {
  if (!v.is_array()) bad("'" + key + "' must be an array of rows");
  if (v.empty()) return Matrix(rows_if_empty, 0);
  const std::size_t rows = v.size();
  std::size_t cols = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    if (!v[i].is_array()) bad("'" + key + "' rows must be arrays");
    if (i == 0) cols = v[i].size();
    if (v[i].size() != cols) bad("'" + key + "' rows have unequal lengths");
  }
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = number(v[i][j], key);
  return m;
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) bad("unknown key '" + it.key() + "' in " + where);
  }
}

}  // namespace

RunConfig parse_config(const json& doc) {
  if (!doc.is_object()) bad("config must be a JSON object");
  check_keys(doc,
             {"plant", "gamma", "epsilon", "epsilon_list", "order", "grid_size", "convention",
              "bisection", "seed", "output_path", "simulation"},
             "config");
  RunConfig cfg;
  cfg.canonical = doc.dump();

  if (!doc.contains("plant")) bad("missing 'plant'");
  const json& plant = doc["plant"];
  if (!plant.is_object()) bad("'plant' must be an object");
  check_keys(plant, {"A", "B1", "B2", "L", "K"}, "plant");
  for (const char* key : {"A", "B2", "L"}) {
    if (!plant.contains(key)) bad(std::string("missing 'plant.") + key + "'");
  }
  SystemSpec& s = cfg.spec;
  s.A = matrix(plant["A"], "A", 0);
  const std::size_t n = s.A.rows();
  s.B1 = plant.contains("B1") ? matrix(plant["B1"], "B1", n) : Matrix(n, 0);
  s.B2 = matrix(plant["B2"], "B2", n);
  s.L = matrix(plant["L"], "L", 0);
  s.K = plant.contains("K") ? matrix(plant["K"], "K", 0) : Matrix(n, n);

  if (doc.contains("gamma")) {
    s.gamma = positive(doc["gamma"], "gamma");
    cfg.gamma_given = true;
  }
  if (doc.contains("epsilon")) {
    s.epsilon = positive(doc["epsilon"], "epsilon");
    cfg.epsilon_given = true;
  }
  if (doc.contains("epsilon_list")) {
    const json& l = doc["epsilon_list"];
    if (!l.is_array() || l.empty()) bad("'epsilon_list' must be a non-empty array");
    for (const json& e : l) cfg.epsilon_list.push_back(positive(e, "epsilon_list"));
    for (std::size_t i = 0; i + 1 < cfg.epsilon_list.size(); ++i) {
      if (!(cfg.epsilon_list[i + 1] < cfg.epsilon_list[i])) {
        bad("'epsilon_list' must be strictly decreasing");
      }
    }
  } else {
    cfg.epsilon_list = default_epsilon_sweep();
  }
  if (doc.contains("order")) {
    cfg.order = count(doc["order"], "order");
    if (cfg.order > kMaxSeriesOrder) bad("'order' above " + std::to_string(kMaxSeriesOrder));
  }
  if (doc.contains("grid_size")) {
    cfg.grid_size = count(doc["grid_size"], "grid_size");
    if (cfg.grid_size < kMinGridSize || cfg.grid_size % 2 != 0 ||
        kDefaultRk4Steps % cfg.grid_size != 0) {
      bad("'grid_size' must be an even divisor of 4096 and at least 16");
    }
  }
  if (doc.contains("convention")) {
    if (!doc["convention"].is_string()) bad("'convention' must be a string");
    cfg.convention = parse_convention(doc["convention"].get<std::string>());
  }
  if (doc.contains("bisection")) {
    const json& b = doc["bisection"];
    if (!b.is_object()) bad("'bisection' must be an object");
    check_keys(b, {"tol", "gamma_max"}, "bisection");
    if (b.contains("tol")) cfg.bisection.tol = positive(b["tol"], "bisection.tol");
    if (b.contains("gamma_max")) {
      cfg.bisection.gamma_max = positive(b["gamma_max"], "bisection.gamma_max");
    }
  }
  if (doc.contains("seed")) cfg.seed = count(doc["seed"], "seed");
  if (doc.contains("output_path")) {
    if (!doc["output_path"].is_string()) bad("'output_path' must be a string");
    cfg.output_path = doc["output_path"].get<std::string>();
  }

  SimulationConfig& sim = cfg.simulation;
  sim.disturbance.seed = cfg.seed;
  if (doc.contains("simulation")) {
    const json& j = doc["simulation"];
    if (!j.is_object()) bad("'simulation' must be an object");
    check_keys(j, {"horizon", "step", "mode", "disturbance"}, "simulation");
    if (j.contains("horizon")) sim.horizon = positive(j["horizon"], "simulation.horizon");
    if (j.contains("step")) sim.step = positive(j["step"], "simulation.step");
    if (j.contains("mode")) {
      const json& m = j["mode"];
      if (m == "saddle") {
        sim.mode = ControlMode::saddle;
      } else if (m == "open_loop") {
        sim.mode = ControlMode::open_loop;
      } else {
        bad("'simulation.mode' must be saddle or open_loop");
      }
    }
    if (j.contains("disturbance")) {
      const json& d = j["disturbance"];
      if (!d.is_object()) bad("'simulation.disturbance' must be an object");
      check_keys(d, {"kind", "amplitude", "duration", "cutoff", "harmonics", "seed"},
                 "simulation.disturbance");
      Disturbance& w = sim.disturbance;
      if (d.contains("kind")) {
        if (!d["kind"].is_string()) bad("'disturbance.kind' must be a string");
        w.kind = parse_disturbance_kind(d["kind"].get<std::string>());
      }
      if (d.contains("amplitude")) w.amplitude = number(d["amplitude"], "disturbance.amplitude");
      if (d.contains("duration")) w.duration = positive(d["duration"], "disturbance.duration");
      if (d.contains("cutoff")) w.cutoff = positive(d["cutoff"], "disturbance.cutoff");
      if (d.contains("harmonics")) w.harmonics = count(d["harmonics"], "disturbance.harmonics");
      if (d.contains("seed")) w.seed = count(d["seed"], "disturbance.seed");
    }
  }

  try {
    s.validate();
  } catch (const Error& e) {
    bad(std::string("invalid plant: ") + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buf.str());
  } catch (const json::exception& e) {
    bad(std::string("malformed config: ") + e.what());
  }
  return parse_config(doc);
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

}  // namespace hvib::io
