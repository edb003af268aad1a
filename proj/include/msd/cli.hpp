#pragma once

#include <nlohmann/json.hpp>

#include <string>

namespace msd {

/// A fully specified run: command plus a flat option map. Every output file
/// is a pure function of one of these; the config is echoed into outputs
/// (JSON inline, CSV via a sidecar .run.json).
struct RunConfig {
  std::string command;
  nlohmann::json options = nlohmann::json::object();

  bool has(const std::string& key) const { return options.contains(key); }
  double num(const std::string& key, double fallback) const;
  long integer(const std::string& key, long fallback) const;
  std::string str(const std::string& key, const std::string& fallback) const;

  std::string to_json_string() const;
  static RunConfig from_json_string(const std::string& text);
};

/// Duration strings: plain numbers are absolute time; a "T" suffix counts
/// periods of `T`; a "Tslow" suffix counts periods of `T_slow`.
double parse_duration(const std::string& text, double T, double T_slow);

/// Resolve an output path against MSD_OUT_DIR when it is relative.
std::string resolve_output_path(const std::string& path);

int cmd_simulate(const RunConfig& config);
int cmd_sindy(const RunConfig& config);
int cmd_havok(const RunConfig& config);
int cmd_sweep(const RunConfig& config);

/// Dispatch on config.command; returns the process exit code.
int run_command(const RunConfig& config);

}  // namespace msd
