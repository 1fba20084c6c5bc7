#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace eelm::cli {

/// Record of one CLI invocation, written to <out>/run_manifest.json on every
/// exit path. Everything that varies between identical invocations (start
/// time, wall-clock duration) lives under "volatile".
class RunRecord {
 public:
  RunRecord(std::string command, std::filesystem::path outDir);

  void set(const std::string& key, nlohmann::json value) { fields_[key] = std::move(value); }
  void addOutput(const std::filesystem::path& file);
  /// Writes the record; returns `exitCode` so commands can `return rec.finish(...)`.
  int finish(int exitCode, const std::string& error = {});

  nlohmann::json toJson(int exitCode, const std::string& error) const;

 private:
  std::string command_;
  std::filesystem::path outDir_;
  nlohmann::json fields_ = nlohmann::json::object();
  std::vector<std::string> outputs_;
  std::chrono::system_clock::time_point startedWall_;
  std::chrono::steady_clock::time_point started_;
};

}  // namespace eelm::cli
