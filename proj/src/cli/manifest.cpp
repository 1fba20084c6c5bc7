#include "eelm/cli/manifest.hpp"

#include <fstream>
#include <iostream>

#include <fmt/chrono.h>
#include <fmt/format.h>

namespace eelm::cli {

RunRecord::RunRecord(std::string command, std::filesystem::path outDir)
    : command_(std::move(command)),
      outDir_(std::move(outDir)),
      startedWall_(std::chrono::system_clock::now()),
      started_(std::chrono::steady_clock::now()) {}

void RunRecord::addOutput(const std::filesystem::path& file) {
  outputs_.push_back(file.filename().string());
}

nlohmann::json RunRecord::toJson(int exitCode, const std::string& error) const {
  nlohmann::json j = {
      {"record", "command"},
      {"command", command_},
      {"exit_code", exitCode},
      {"status", exitCode == 0 ? "ok" : "error"},
      {"outputs", outputs_},
  };
  if (!error.empty()) j["error"] = error;
  for (const auto& [k, v] : fields_.items()) j[k] = v;
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
  j["volatile"] = {
      {"started_utc", fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::chrono::system_clock::to_time_t(startedWall_)))},
      {"wall_seconds", seconds},
  };
  return j;
}

int RunRecord::finish(int exitCode, const std::string& error) {
  std::error_code ec;
  std::filesystem::create_directories(outDir_, ec);
  const auto path = outDir_ / "run_manifest.json";
  std::ofstream out(path);
  if (!out) {
    std::cerr << fmt::format("warning: could not write {}\n", path.string());
    return exitCode;
  }
  out << toJson(exitCode, error).dump(2) << '\n';
  return exitCode;
}

}  // namespace eelm::cli
