#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lmcf/estimate.hpp"
#include "lmcf/flow.hpp"

namespace lmcf {

inline constexpr const char* kArtifactVersion = "0.1.0";

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flat `key = value` configuration with [section] headers and `#` comments.
/// Every key has a documented default; keys outside the known schema are hard
/// errors (they would silently change an experiment).
class Config {
 public:
  static Config parse_file(const std::filesystem::path& path);
  static Config parse_text(const std::string& text);

  bool has(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key, double def) const;
  long get_long(const std::string& section, const std::string& key, long def) const;
  bool get_bool(const std::string& section, const std::string& key, bool def) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& def) const;
  std::vector<double> get_double_list(const std::string& section, const std::string& key,
                                      const std::string& def) const;

  /// Throws ConfigError on any parsed key absent from the global schema.
  void enforce_known_keys() const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;  // "section.key" -> raw value
};

/// Shortest round-trip decimal form of a double (and exact re-parse).
std::string format_double(double v);
double parse_double(const std::string& s);

/// Whole-file atomic write (temp file + rename).
void atomic_write_file(const std::filesystem::path& path, const std::string& content);

void write_snapshots_csv(const std::filesystem::path& path, const Trajectory& traj);

struct LoadedTrajectory {
  Trajectory trajectory;
  std::map<std::string, std::string> resolved_config;
};
LoadedTrajectory read_trajectory(const std::filesystem::path& dir);

void write_trajectory_svg(const std::filesystem::path& path, const Trajectory& traj);

struct CliOptions {
  std::string command;
  std::filesystem::path config_path;
  std::filesystem::path out_dir = "out";
  std::filesystem::path traj_dir;
  std::uint64_t seed = 12345;
  bool seed_given = false;
  bool audit = false;
  bool svg = false;
};

/// Exit codes: 0 ok, 1 failed check / inadmissible cell, 2 config error,
/// 3 numerical abort (reason recorded in the manifest).
int cmd_simulate(const CliOptions& opts);
int cmd_verify(const CliOptions& opts);
int cmd_estimate(const CliOptions& opts);
int cmd_inequalities(const CliOptions& opts);
int cmd_soliton(const CliOptions& opts);

/// Resolved flow configuration from [solution] + [flow] sections.
FlowConfig flow_config_from(const Config& cfg);

}  // namespace lmcf
