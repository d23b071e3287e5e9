#pragma once

#include "nsk/diagnostics.hpp"
#include "nsk/solver.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nsk::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kBlowUp = 3, kViolation = 4 };

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat `key = value` configuration; `#` starts a comment.
class Config {
 public:
  static Config parse(std::istream& in, const std::string& source = "<config>");
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  std::string get(const std::string& key, const std::string& fallback) const;
  Real get_real(const std::string& key, Real fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }
  void set(const std::string& key, const std::string& value) { entries_[key] = value; }

  /// Keys recognised by the commands; anything else is rejected at parse time.
  static const std::vector<std::string>& known_keys();

 private:
  std::map<std::string, std::string> entries_;
};

struct RunSetup {
  State initial;
  SolverConfig solver;
  std::string preset;
  std::uint64_t seed = 0;
};

/// Builds the initial state and solver settings; throws ConfigError.
RunSetup make_setup(const Config& config);

/// Worker bound from NSK_THREADS (default 1, at least 1).
int worker_count();

/// Runs body(i) for i in [0, count) on at most worker_count() threads.
/// Exceptions propagate from the lowest failing index.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

/// Shortest-round-trip decimal rendering used by every CSV writer.
std::string format_real(Real v);

/// zlib crc32 of a file's bytes.
std::uint32_t file_crc32(const std::filesystem::path& path);

struct Manifest {
  std::string subcommand;
  std::map<std::string, std::string> config;
  nlohmann::json summary = nlohmann::json::object();
  std::vector<std::filesystem::path> outputs;
  double wall_clock_seconds = 0.0;

  /// Writes manifest.json into dir; every output is listed with size and crc32.
  std::filesystem::path write(const std::filesystem::path& dir) const;
};

std::string version_string();

// Subcommands. Each writes into out_dir, logs to `log`, and returns an ExitCode.
int cmd_run(const std::filesystem::path& config_path, const std::filesystem::path& out_dir, std::ostream& log);
int cmd_test_truncations(const std::filesystem::path& out_dir, std::ostream& log, const BoundSuiteOptions& options = {});
int cmd_test_commutator(const std::filesystem::path& out_dir, std::ostream& log);
int cmd_sweep_remainder(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
                        std::ostream& log);
int cmd_report(const std::filesystem::path& config_path, const std::filesystem::path& out_dir, std::ostream& log);

/// Keys every report document carries; used by the schema check.
const std::vector<std::string>& report_schema_keys();
/// Throws std::invalid_argument naming the first missing or mistyped field.
void validate_report(const nlohmann::json& report);

}  // namespace nsk::cli
