#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace eulerlab::cli {

// Exit statuses.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;  // numeric failure or failed verification
inline constexpr int kUsage = 2;

struct Artifact {
  std::string name;  // "stdout" or a file path
  std::string content;
};

struct Outcome {
  int status = kOk;
  std::vector<Artifact> artifacts;
  nlohmann::json config;  // configuration echo for the manifest
  std::string command;
  std::uint64_t seed = 0;
  std::string diagnostic;  // written to stderr
};

// Parses and runs one invocation; args excludes the program name. Nothing is
// written to disk or to the standard streams.
Outcome run(const std::vector<std::string>& args);

std::string sha256_hex(const std::string& data);

nlohmann::json make_manifest(const std::vector<std::string>& args, const Outcome& outcome, double wall_seconds);

// Re-runs the argv recorded in a manifest and compares output digests.
// Returns true when every digest matches; mismatches are described in report.
bool replay(const nlohmann::json& manifest, std::string& report);

// CSV helpers: 17 significant digits, NaN as "nan".
std::string format_number(double x);
std::string json_to_csv(const nlohmann::json& record);

}  // namespace eulerlab::cli
