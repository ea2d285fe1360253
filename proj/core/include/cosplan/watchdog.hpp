// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <condition_variable>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

namespace cosplan {

struct WatchdogPolicy {
  double heartbeat_interval = 2.0;  ///< s between heartbeat samples
  double stall_timeout = 60.0;      ///< s without a heartbeat touch
  int max_restarts = 2;
  bool restart_on_nonzero_exit = true;
  bool restart_on_stall = true;

  /// Requires stall_timeout > heartbeat_interval > 0 and max_restarts >= 0.
  void validate() const;
};

/// Newline-delimited JSON events {ts, stage, event, attempt, detail}.
/// The monitor is the only writer; appends are serialized.
class EventLog {
 public:
  explicit EventLog(std::filesystem::path path);

  void append(const std::string& stage, const std::string& event, int attempt,
              const nlohmann::json& detail = nlohmann::json::object());
  [[nodiscard]] const std::filesystem::path& path() const { return path_; }

  /// Parsed events; malformed lines are skipped.
  static std::vector<nlohmann::json> read(const std::filesystem::path& path);

 private:
  std::filesystem::path path_;
  std::mutex mu_;
};

struct StageCommand {
  std::string stage;
  std::vector<std::string> argv;  ///< argv[0] is the executable path
  std::filesystem::path heartbeat;
  std::optional<std::filesystem::path> working_dir;
  /// Child stdout/stderr are appended here when set.
  std::optional<std::filesystem::path> output_log;
  /// Extra detail recorded with the finish event (e.g. checksum, artifacts).
  nlohmann::json finish_detail = nlohmann::json::object();
};

enum class StageStatus { kSucceeded, kFailed, kSkipped };
std::string_view stage_status_name(StageStatus s);

struct StageRecord {
  std::string stage;
  StageStatus status = StageStatus::kFailed;
  int attempts = 0;
  int restarts = 0;
  int stalls = 0;
  int last_exit_code = -1;
  double wall_seconds = 0.0;
  [[nodiscard]] nlohmann::json to_json() const;
};

/// Child side of the contract: touches `path` immediately and then every
/// `interval` seconds from a background thread until destroyed.
class HeartbeatWriter {
 public:
  HeartbeatWriter(std::filesystem::path path, double interval);
  ~HeartbeatWriter();
  HeartbeatWriter(const HeartbeatWriter&) = delete;
  HeartbeatWriter& operator=(const HeartbeatWriter&) = delete;

 private:
  std::filesystem::path path_;
  double interval_;
  std::mutex mu_;
  std::condition_variable cv_;
  bool stop_ = false;
  std::thread thread_;
};

/// Creates the file if needed and sets its mtime to now.
void touch_file(const std::filesystem::path& path);

/// Launches the child, samples its exit status and the heartbeat file's
/// mtime every heartbeat_interval, and restarts it on a non-zero exit or a
/// stall (now - max(launch, mtime) > stall_timeout) until max_restarts is
/// used up. Events: launch, stall, exit, restart, finish, give_up.
StageRecord run_stage(const StageCommand& cmd, const WatchdogPolicy& policy, EventLog& log);

}  // namespace cosplan
