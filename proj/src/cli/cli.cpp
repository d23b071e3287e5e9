#include "nsk/cli.hpp"

#include "nsk/mollify.hpp"
#include "nsk/snapshot.hpp"

#include <zlib.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <optional>
#include <sstream>
#include <thread>

#ifndef NSK_VERSION
#define NSK_VERSION "unknown"
#endif

namespace nsk::cli {

namespace fs = std::filesystem;
using nlohmann::json;

// --- config -------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

const std::vector<std::string>& Config::known_keys() {
  static const std::vector<std::string> keys = {
      "scheme",     "dim",          "n",           "gamma",          "epsilon",       "coefficients",
      "dt",         "cfl",          "T",           "cadence",        "preset",        "a",
      "b",          "rho_min",      "vacuum_floor", "abort_on_cfl",  "linearization", "seed",
      "snapshot",   "state_file",   "state_amplitude", "state_velocity", "lambda_exp_min", "lambda_exp_max",
      "alpha",
  };
  return keys;
}

Config Config::parse(std::istream& in, const std::string& source) {
  Config c;
  const auto& keys = known_keys();
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const auto where = [&] { return source + ":" + std::to_string(line_no) + ": "; };
    if (eq == std::string::npos) throw ConfigError(where() + "expected 'key = value', got '" + trim(raw) + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw ConfigError(where() + "empty key or value in '" + trim(raw) + "'");
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      throw ConfigError(where() + "unknown key '" + key + "' in '" + trim(raw) + "'");
    if (c.has(key)) throw ConfigError(where() + "duplicate key '" + key + "'");
    c.entries_[key] = value;
  }
  return c;
}

Config Config::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse(in, path.string());
}

std::string Config::get(const std::string& key, const std::string& fallback) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

Real Config::get_real(const std::string& key, Real fallback) const {
  if (!has(key)) return fallback;
  const std::string& v = entries_.at(key);
  Real out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError("key '" + key + "': not a number '" + v + "'");
  return out;
}

int Config::get_int(const std::string& key, int fallback) const {
  if (!has(key)) return fallback;
  const std::string& v = entries_.at(key);
  int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError("key '" + key + "': not an integer '" + v + "'");
  return out;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string& v = entries_.at(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("key '" + key + "': not a boolean '" + v + "'");
}

RunSetup make_setup(const Config& config) {
  try {
    InitialDataParams ip;
    ip.dim = config.get_int("dim", 1);
    ip.n = config.get_int("n", 64);
    ip.a = config.get_real("a", 0.0);
    ip.b = config.get_real("b", 0.0);
    ip.rho_min = config.get_real("rho_min", 1e-6);
    ip.physics.gamma = config.get_real("gamma", 2.0);
    ip.physics.epsilon = config.get_real("epsilon", 0.0);
    const std::string coeff = config.get("coefficients", "standard");
    if (coeff == "standard")
      ip.physics.coefficients = CoefficientSet::standard();
    else if (coeff == "quantum")
      ip.physics.coefficients = CoefficientSet::quantum();
    else
      throw ConfigError("key 'coefficients': expected 'standard' or 'quantum', got '" + coeff + "'");

    RunSetup s{initial_data(config.get("preset", "EQUILIBRIUM"), ip), {}, config.get("preset", "EQUILIBRIUM"),
               static_cast<std::uint64_t>(config.get_int("seed", 20240601))};
    s.solver.scheme = parse_scheme(config.get("scheme", "rk4"));
    s.solver.dt = config.get_real("dt", 0.0);
    s.solver.cfl = config.get_real("cfl", 0.4);
    s.solver.vacuum_floor = config.get_real("vacuum_floor", 0.0);
    if (!config.has("T")) throw ConfigError("missing required key 'T'");
    s.solver.end_time = config.get_real("T", 0.0);
    s.solver.cadence = config.get_int("cadence", 1);
    s.solver.abort_on_cfl = config.get_bool("abort_on_cfl", false);
    const std::string lin = config.get("linearization", "mean");
    if (lin != "mean" && lin != "max") throw ConfigError("key 'linearization': expected 'mean' or 'max'");
    s.solver.linearization = lin == "mean" ? ImexLinearization::Mean : ImexLinearization::Max;
    s.solver.validate();
    if (ip.physics.epsilon > 0.0 && s.initial.rho.min() <= 0.0)
      throw ConfigError("epsilon > 0 with exact vacuum in the initial density is rejected");
    return s;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

// --- infrastructure -----------------------------------------------------

int worker_count() {
  if (const char* env = std::getenv("NSK_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return 1;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(worker_count()), count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::string format_real(Real v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) return "nan";
  return {buf, ptr};
}

std::uint32_t file_crc32(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  uLong crc = crc32(0L, Z_NULL, 0);
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    const auto got = in.gcount();
    if (got > 0) crc = crc32(crc, reinterpret_cast<const Bytef*>(buf.data()), static_cast<uInt>(got));
  }
  return static_cast<std::uint32_t>(crc);
}

std::string version_string() { return NSK_VERSION; }

fs::path Manifest::write(const fs::path& dir) const {
  json files = json::array();
  for (const auto& p : outputs) {
    if (!fs::exists(p)) throw std::runtime_error("manifest lists missing output " + p.string());
    std::ostringstream crc;
    crc << std::hex << std::setw(8) << std::setfill('0') << file_crc32(p);
    files.push_back({{"path", fs::relative(p, dir).generic_string()},
                     {"bytes", static_cast<std::uint64_t>(fs::file_size(p))},
                     {"crc32", crc.str()}});
  }
  const std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  json doc = {{"subcommand", subcommand},   {"version", version_string()},
              {"timestamp", stamp},         {"wall_clock_seconds", wall_clock_seconds},
              {"config", config},           {"summary", summary},
              {"outputs", files}};
  const fs::path path = dir / "manifest.json";
  std::ofstream(path) << doc.dump(2) << '\n';
  return path;
}

// --- run machinery ------------------------------------------------------

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool pass = true;
  json detail = json::object();
};

struct Outcome {
  int code = kOk;
  std::string error;
  RunResult result;
  std::vector<DiagnosticsRecord> records;
  std::map<std::string, Verdict> verdicts;
};

json inequality_json(const InequalityReport& r) {
  return {{"initial", r.initial},
          {"final", r.final},
          {"accumulated_dissipation", r.accumulated},
          {"step_constant", r.step_constant},
          {"tolerance_per_step", r.tolerance_per_step},
          {"max_excess", r.max_excess},
          {"total_violation", r.total_violation},
          {"budget", r.budget},
          {"violating_steps", r.violating_steps},
          {"pass", r.pass}};
}

Outcome execute(const RunSetup& setup, std::ostream& log) {
  Outcome out;
  const Real floor = setup.solver.vacuum_floor > 0.0 ? setup.solver.vacuum_floor : -1.0;
  try {
    out.records.push_back(record(setup.initial, floor));
    out.result = run(setup.initial, setup.solver,
                     [&](const State& s, std::size_t) { out.records.push_back(record(s, floor)); });
  } catch (const BlowUpError& e) {
    out.code = kBlowUp;
    out.error = e.what();
    log << "blow-up: " << e.what() << '\n';
    return out;
  } catch (const NumericalError& e) {
    out.code = kBlowUp;
    out.error = e.what();
    log << "numerical failure: " << e.what() << '\n';
    return out;
  }
  for (const auto& w : out.result.warnings) log << "warning: " << w << '\n';

  const Real dt = out.result.dt;
  const Scheme scheme = setup.solver.scheme;
  const auto& p = setup.initial.params;
  const auto e = check_energy_inequality(out.records, dt, FrozenTolerance::energy(scheme));
  out.verdicts["energy"] = {e.pass, inequality_json(e)};
  const bool positive = std::all_of(out.records.begin(), out.records.end(), [](const auto& r) { return r.min_rho > 0.0; });
  if (positive) {
    const auto b = check_bd_inequality(out.records, dt, FrozenTolerance::bd(scheme), p.gamma, p.epsilon);
    out.verdicts["bd_entropy"] = {b.pass, inequality_json(b)};
  } else {
    out.verdicts["bd_entropy"] = {true, {{"skipped", "density touches vacuum"}}};
  }
  const Real m0 = out.records.front().mass, m1 = out.records.back().mass;
  const Real mass_rate = std::abs(m1 - m0) / (std::abs(m0) * setup.solver.end_time);
  out.verdicts["mass"] = {mass_rate <= 1e-12, {{"relative_drift_per_time", mass_rate}, {"tolerance", 1e-12},
                                               {"clamp_events", out.result.clamp_events},
                                               {"max_clamp", out.result.max_clamp}}};
  Real mom = 0.0;
  for (int i = 0; i < 3; ++i)
    mom = std::max(mom, std::abs(out.records.back().momentum[i] - out.records.front().momentum[i]));
  out.verdicts["momentum"] = {p.epsilon != 0.0 || mom <= 1e-10,
                              {{"drift", mom}, {"tolerance", 1e-10}, {"checked", p.epsilon == 0.0}}};
  for (const auto& [name, v] : out.verdicts)
    if (!v.pass) {
      log << "violation: " << name << ' ' << v.detail.dump() << '\n';
      out.code = kViolation;
    }
  return out;
}

void write_records_csv(const fs::path& path, const std::vector<DiagnosticsRecord>& records, int cadence) {
  std::ofstream out(path);
  out << "time,energy,bd_entropy,diss_sym,diss_antisym,diss_quartic,diss_linear,diss_laplacian,diss_pressure,"
         "diss_bohm,cubic_cross,mass,momentum_1,momentum_2,momentum_3,min_rho\n";
  for (std::size_t i = 0; i < records.size(); i += static_cast<std::size_t>(cadence)) {
    const auto& r = records[i];
    const auto& d = r.dissipation;
    const Real row[] = {r.time,      r.energy,       r.bd,          d.sym,         d.antisym,     d.quartic,
                        d.linear,    d.laplacian,    d.pressure,    d.bohm,        d.cubic_cross, r.mass,
                        r.momentum[0], r.momentum[1], r.momentum[2], r.min_rho};
    for (std::size_t k = 0; k < std::size(row); ++k) out << (k ? "," : "") << format_real(row[k]);
    out << '\n';
  }
}

std::vector<NamedField> state_fields(const State& s) {
  std::vector<NamedField> f{{"rho", s.rho}};
  append_named(f, "m", s.m);
  return f;
}

int config_failure(std::ostream& log, const std::exception& e) {
  log << "config error: " << e.what() << '\n';
  return kConfigError;
}

}  // namespace

int cmd_run(const fs::path& config_path, const fs::path& out_dir, std::ostream& log) {
  const auto t0 = Clock::now();
  Config config;
  std::optional<RunSetup> loaded;
  try {
    config = Config::load(config_path);
    loaded = make_setup(config);
  } catch (const ConfigError& e) {
    return config_failure(log, e);
  }
  const RunSetup& setup = *loaded;
  fs::create_directories(out_dir);
  Manifest manifest{"run", config.entries(), {}, {}, 0.0};
  const Outcome o = execute(setup, log);
  manifest.summary["exit_code"] = o.code;
  if (!o.error.empty()) manifest.summary["error"] = o.error;
  for (const auto& [name, v] : o.verdicts) manifest.summary[name] = v.detail;
  if (!o.records.empty()) {
    const fs::path csv = out_dir / "diagnostics.csv";
    write_records_csv(csv, o.records, setup.solver.cadence);
    manifest.outputs.push_back(csv);
  }
  if (o.code != kBlowUp && config.get_bool("snapshot", true)) {
    const State& last = o.result.frames.back();
    const fs::path snap = out_dir / "final.nskf";
    write_snapshot(snap, state_fields(last));
    const fs::path slice = out_dir / "final_slice.csv";
    write_csv_slice(slice, state_fields(last));
    manifest.outputs.push_back(snap);
    manifest.outputs.push_back(slice);
  }
  manifest.summary["steps"] = o.result.steps;
  manifest.summary["dt"] = o.result.dt;
  manifest.wall_clock_seconds = seconds_since(t0);
  manifest.write(out_dir);
  log << "run finished with exit code " << o.code << '\n';
  return o.code;
}

int cmd_test_truncations(const fs::path& out_dir, std::ostream& log, const BoundSuiteOptions& options) {
  const auto t0 = Clock::now();
  fs::create_directories(out_dir);
  const auto rows = run_bound_suite(options);
  const fs::path csv = out_dir / "truncations.csv";
  std::ofstream out(csv);
  out << "check,parameter,measured_sup,certified,pass\n";
  std::size_t failures = 0;
  for (const auto& r : rows) {
    out << r.name << ',' << format_real(r.parameter) << ',' << format_real(r.measured_sup) << ','
        << format_real(r.certified) << ',' << (r.pass ? 1 : 0) << '\n';
    if (!r.pass) ++failures;
  }
  out.close();
  Manifest manifest{"test-truncations", {}, {}, {}, 0.0};
  manifest.summary = {{"checks", rows.size()}, {"failures", failures}};
  manifest.outputs.push_back(csv);
  manifest.wall_clock_seconds = seconds_since(t0);
  manifest.write(out_dir);
  log << rows.size() << " truncation checks, " << failures << " failures\n";
  return failures == 0 ? kOk : kViolation;
}

int cmd_test_commutator(const fs::path& out_dir, std::ostream& log) {
  const auto t0 = Clock::now();
  fs::create_directories(out_dir);
  const auto corpus = smooth_corpus();
  const auto rows = commutator_sweep(corpus);
  const fs::path csv = out_dir / "commutator.csv";
  std::ofstream out(csv);
  out << "radius,div_norm,dt_norm,div_ratio,dt_ratio\n";
  bool decreasing = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out << format_real(r.radius) << ',' << format_real(r.div_norm) << ',' << format_real(r.dt_norm) << ','
        << format_real(r.div_norm / rows.front().div_norm) << ',' << format_real(r.dt_norm / rows.front().dt_norm)
        << '\n';
    if (i > 0) decreasing = decreasing && r.div_norm < rows[i - 1].div_norm && r.dt_norm < rows[i - 1].dt_norm;
  }
  out.close();
  Manifest manifest{"test-commutator", {}, {}, {}, 0.0};
  manifest.summary = {{"levels", rows.size()},
                      {"strictly_decreasing", decreasing},
                      {"div_final_over_initial", rows.back().div_norm / rows.front().div_norm},
                      {"dt_final_over_initial", rows.back().dt_norm / rows.front().dt_norm}};
  manifest.outputs.push_back(csv);
  manifest.wall_clock_seconds = seconds_since(t0);
  manifest.write(out_dir);
  log << "commutator sweep over " << rows.size() << " radii, strictly decreasing: " << decreasing << '\n';
  return decreasing ? kOk : kViolation;
}

int cmd_sweep_remainder(const fs::path& config_path, const fs::path& out_dir, std::ostream& log) {
  const auto t0 = Clock::now();
  Config config;
  std::optional<State> loaded;
  int lo = 2, hi = 8;
  Real alpha = 0.75;
  try {
    config = Config::load(config_path);
    PhysicsParams physics;
    physics.gamma = config.get_real("gamma", 2.0);
    physics.epsilon = config.get_real("epsilon", 0.1);
    physics.validate();
    if (config.has("state_file")) {
      const auto fields = read_snapshot(config.get("state_file", ""));
      if (fields.empty() || fields.front().name != "rho") throw ConfigError("state_file must start with a 'rho' field");
      std::vector<ScalarField> m;
      for (std::size_t i = 1; i < fields.size(); ++i) m.push_back(fields[i].field);
      const Grid& g = fields.front().field.grid();
      if (static_cast<int>(m.size()) != g.dim()) throw ConfigError("state_file must hold rho and m_1..m_d");
      loaded = State{fields.front().field, VectorField(g, std::move(m)), 0.0, physics};
    } else {
      const Grid g(config.get_int("dim", 1), config.get_int("n", 256));
      const Real A = config.get_real("state_amplitude", std::log(256.0));
      const Real U = config.get_real("state_velocity", 64.0);
      auto rho = ScalarField::from_function(g, [A](const Point& x) { return std::exp(A * std::cos(2.0 * std::numbers::pi * x[0])); });
      auto u = ScalarField::from_function(g, [U](const Point& x) { return U * std::sin(2.0 * std::numbers::pi * x[0]); });
      std::vector<ScalarField> comps(g.dim(), ScalarField(g));
      comps[0] = rho * u;
      loaded = State{rho, VectorField(g, std::move(comps)), 0.0, physics};
    }
    loaded->validate();
    lo = config.get_int("lambda_exp_min", 2);
    hi = config.get_int("lambda_exp_max", 8);
    alpha = config.get_real("alpha", 0.75);
    if (lo > hi || lo < 0) throw ConfigError("lambda exponents must satisfy 0 <= min <= max");
    if (!(alpha > 0.5 && alpha < 1.0)) throw ConfigError("alpha must lie in (1/2, 1)");
  } catch (const ConfigError& e) {
    return config_failure(log, e);
  } catch (const std::exception& e) {
    return config_failure(log, e);
  }
  const State& state = *loaded;
  fs::create_directories(out_dir);
  const std::size_t count = static_cast<std::size_t>(hi - lo + 1);
  std::vector<RemainderReport> reps(count);
  std::vector<Real> rbar(count);
  try {
    parallel_for(count, [&](std::size_t i) {
      const Real lambda = std::ldexp(1.0, -(lo + static_cast<int>(i)));
      const Real delta = std::pow(lambda, alpha);
      reps[i] = remainder(state, delta, lambda);
      rbar[i] = rbar_remainder(state, delta);
    });
  } catch (const NumericalError& e) {
    log << "numerical failure: " << e.what() << '\n';
    return kBlowUp;
  }
  std::vector<Real> totals, shapes;
  for (const auto& r : reps) {
    totals.push_back(r.total_r);
    shapes.push_back(r.shape);
  }
  const Real c = fit_envelope(totals, shapes);
  const fs::path csv = out_dir / "remainder.csv";
  std::ofstream out(csv);
  out << "delta,lambda";
  for (int i = 1; i <= 6; ++i) out << ",R" << i;
  for (int i = 1; i <= 6; ++i) out << ",Rt" << i;
  out << ",total_R,total_Rt,total,rbar,shape,envelope,pass\n";
  bool all_pass = true, decreasing = true;
  for (std::size_t i = 0; i < count; ++i) {
    const auto& r = reps[i];
    const Real envelope = c * r.shape;
    const bool pass = r.total_r <= envelope * (1.0 + 1e-12);
    all_pass = all_pass && pass;
    if (i > 0) decreasing = decreasing && r.total_r < reps[i - 1].total_r;
    out << format_real(r.delta) << ',' << format_real(r.lambda);
    for (Real v : r.r) out << ',' << format_real(v);
    for (Real v : r.r_tilde) out << ',' << format_real(v);
    out << ',' << format_real(r.total_r) << ',' << format_real(r.total_r_tilde) << ',' << format_real(r.total) << ','
        << format_real(rbar[i]) << ',' << format_real(r.shape) << ',' << format_real(envelope) << ','
        << (pass ? 1 : 0) << '\n';
  }
  out.close();
  Manifest manifest{"sweep-remainder", config.entries(), {}, {}, 0.0};
  manifest.summary = {{"envelope_constant", c}, {"all_under_envelope", all_pass}, {"strictly_decreasing", decreasing}};
  manifest.outputs.push_back(csv);
  manifest.wall_clock_seconds = seconds_since(t0);
  manifest.write(out_dir);
  log << "remainder sweep: C = " << c << ", under envelope: " << all_pass << ", strictly decreasing: " << decreasing
      << '\n';
  return all_pass ? kOk : kViolation;
}

const std::vector<std::string>& report_schema_keys() {
  static const std::vector<std::string> keys = {"schema_version", "version", "config", "exit_code", "verdicts", "norms"};
  return keys;
}

void validate_report(const json& report) {
  if (!report.is_object()) throw std::invalid_argument("report must be a JSON object");
  for (const auto& k : report_schema_keys())
    if (!report.contains(k)) throw std::invalid_argument("report lacks field '" + k + "'");
  if (report["schema_version"] != 1) throw std::invalid_argument("unsupported schema_version");
  if (!report["exit_code"].is_number_integer()) throw std::invalid_argument("exit_code must be an integer");
  if (!report["verdicts"].is_object()) throw std::invalid_argument("verdicts must be an object");
  for (const auto& [name, v] : report["verdicts"].items())
    if (!v.contains("pass") || !v["pass"].is_boolean())
      throw std::invalid_argument("verdict '" + name + "' lacks a boolean 'pass'");
  if (!report["norms"].is_array()) throw std::invalid_argument("norms must be an array");
  for (const auto& row : report["norms"])
    if (!row.contains("group") || !row.contains("name") || !row.contains("value"))
      throw std::invalid_argument("norm rows need group, name and value");
}

int cmd_report(const fs::path& config_path, const fs::path& out_dir, std::ostream& log) {
  const auto t0 = Clock::now();
  Config config;
  std::optional<RunSetup> loaded;
  try {
    config = Config::load(config_path);
    loaded = make_setup(config);
  } catch (const ConfigError& e) {
    return config_failure(log, e);
  }
  const RunSetup& setup = *loaded;
  fs::create_directories(out_dir);
  Outcome o = execute(setup, log);
  json verdicts = json::object();
  for (const auto& [name, v] : o.verdicts) {
    json entry = v.detail;
    entry["pass"] = v.pass;
    verdicts[name] = entry;
  }
  json norms = json::array();
  if (o.code != kBlowUp) {
    const auto& frames = o.result.frames;
    const Real fdt = o.result.frame_dt();
    const Real floor = setup.solver.vacuum_floor > 0.0 ? setup.solver.vacuum_floor : -1.0;
    try {
      for (const auto& row : norm_table(frames, fdt, floor))
        norms.push_back({{"group", row.group}, {"name", row.name}, {"value", row.value}});
      const auto chi = TimeCutoff::for_horizon(setup.solver.end_time);
      const auto phi = trig_test_function(setup.initial.grid(), setup.seed);
      const Real scale = std::max(1.0, std::abs(o.records.front().mass));
      const Real rc = weak_residual_continuity(frames, fdt, chi, phi);
      const Real rm = weak_residual_momentum(frames, fdt, chi, phi, 0, floor);
      verdicts["weak_continuity"] = {{"residual", rc}, {"pass", std::isfinite(rc)}, {"scale", scale}};
      verdicts["weak_momentum"] = {{"residual", rm}, {"pass", std::isfinite(rm)}, {"component", 0}};
    } catch (const NumericalError& e) {
      log << "diagnostics failure: " << e.what() << '\n';
      o.code = kBlowUp;
    }
  }
  json report = {{"schema_version", 1},       {"version", version_string()}, {"config", config.entries()},
                 {"exit_code", o.code},       {"verdicts", verdicts},        {"norms", norms}};
  if (!o.error.empty()) report["error"] = o.error;
  validate_report(report);
  const fs::path path = out_dir / "report.json";
  std::ofstream(path) << report.dump(2) << '\n';
  Manifest manifest{"report", config.entries(), {}, {}, 0.0};
  manifest.summary = {{"exit_code", o.code}};
  manifest.outputs.push_back(path);
  manifest.wall_clock_seconds = seconds_since(t0);
  manifest.write(out_dir);
  log << "report written to " << path.string() << '\n';
  return o.code;
}

}  // namespace nsk::cli
