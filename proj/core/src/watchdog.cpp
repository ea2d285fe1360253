// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#include "cosplan/watchdog.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <fstream>
#include <thread>

#include "cosplan/errors.hpp"

namespace cosplan {

void WatchdogPolicy::validate() const {
  if (!(heartbeat_interval > 0.0)) throw ConfigError("heartbeat_interval must be > 0");
  if (!(stall_timeout > heartbeat_interval)) throw ConfigError("stall_timeout must exceed heartbeat_interval");
  if (max_restarts < 0) throw ConfigError("max_restarts must be >= 0");
}

namespace {

double wall_now() {
  return std::chrono::duration<double>(std::chrono::system_clock::now().time_since_epoch()).count();
}

// Heartbeat mtime in seconds since the epoch, or nullopt if the file is absent.
std::optional<double> heartbeat_mtime(const std::filesystem::path& p) {
  struct stat st {};
  if (::stat(p.c_str(), &st) != 0) return std::nullopt;
  return static_cast<double>(st.st_mtim.tv_sec) + 1e-9 * static_cast<double>(st.st_mtim.tv_nsec);
}

pid_t spawn(const StageCommand& cmd) {
  std::vector<char*> argv;
  for (const auto& a : cmd.argv) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);
  const pid_t pid = ::fork();
  if (pid < 0) throw ResourceError(std::string("fork failed: ") + std::strerror(errno));
  if (pid == 0) {
    if (cmd.working_dir && ::chdir(cmd.working_dir->c_str()) != 0) ::_exit(126);
    if (cmd.output_log) {
      const int fd = ::open(cmd.output_log->c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
      if (fd >= 0) {
        ::dup2(fd, STDOUT_FILENO);
        ::dup2(fd, STDERR_FILENO);
        ::close(fd);
      }
    }
    ::execv(argv[0], argv.data());
    ::_exit(127);
  }
  return pid;
}

int decode_status(int status) {
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  if (WIFSIGNALED(status)) return 128 + WTERMSIG(status);
  return -1;
}

}  // namespace

EventLog::EventLog(std::filesystem::path path) : path_(std::move(path)) {
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
}

void EventLog::append(const std::string& stage, const std::string& event, int attempt, const nlohmann::json& detail) {
  const nlohmann::json e = {{"ts", wall_now()}, {"stage", stage}, {"event", event}, {"attempt", attempt}, {"detail", detail}};
  std::lock_guard<std::mutex> lock(mu_);
  std::ofstream out(path_, std::ios::app);
  if (!out) throw ResourceError("cannot append to event log " + path_.string());
  out << e.dump() << '\n';
}

std::vector<nlohmann::json> EventLog::read(const std::filesystem::path& path) {
  std::vector<nlohmann::json> out;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (!j.is_discarded() && j.is_object()) out.push_back(std::move(j));
  }
  return out;
}

void touch_file(const std::filesystem::path& path) {
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT, 0644);
  if (fd < 0) throw ResourceError("cannot touch " + path.string());
  ::futimens(fd, nullptr);
  ::close(fd);
}

HeartbeatWriter::HeartbeatWriter(std::filesystem::path path, double interval)
    : path_(std::move(path)), interval_(interval) {
  touch_file(path_);
  thread_ = std::thread([this] {
    std::unique_lock<std::mutex> lock(mu_);
    while (!cv_.wait_for(lock, std::chrono::duration<double>(interval_), [this] { return stop_; })) {
      try {
        touch_file(path_);
      } catch (const Error&) {
        // The monitor treats a missing heartbeat as a stall.
      }
    }
  });
}

HeartbeatWriter::~HeartbeatWriter() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    stop_ = true;
  }
  cv_.notify_all();
  thread_.join();
}

std::string_view stage_status_name(StageStatus s) {
  switch (s) {
    case StageStatus::kSucceeded: return "succeeded";
    case StageStatus::kFailed: return "failed";
    case StageStatus::kSkipped: return "skipped";
  }
  return "unknown";
}

nlohmann::json StageRecord::to_json() const {
  return {{"stage", stage},
          {"status", stage_status_name(status)},
          {"attempts", attempts},
          {"restarts", restarts},
          {"stalls", stalls},
          {"exit_code", last_exit_code},
          {"wall_seconds", wall_seconds}};
}

StageRecord run_stage(const StageCommand& cmd, const WatchdogPolicy& policy, EventLog& log) {
  policy.validate();
  if (cmd.argv.empty()) throw ConfigError("stage '" + cmd.stage + "' has an empty command");
  StageRecord rec;
  rec.stage = cmd.stage;
  const auto t0 = std::chrono::steady_clock::now();
  // Exit status is polled more often than the heartbeat so short stages return promptly.
  const auto poll = std::chrono::duration<double>(std::min(policy.heartbeat_interval, 0.05));

  for (;;) {
    ++rec.attempts;
    const int attempt = rec.attempts;
    std::error_code ec;
    std::filesystem::remove(cmd.heartbeat, ec);
    const double launched = wall_now();
    const pid_t pid = spawn(cmd);
    log.append(cmd.stage, "launch", attempt, {{"pid", pid}});

    bool stalled = false;
    int status = 0;
    double next_sample = launched + policy.heartbeat_interval;
    for (;;) {
      const pid_t r = ::waitpid(pid, &status, WNOHANG);
      if (r == pid) break;
      if (r < 0 && errno != EINTR) throw ResourceError(std::string("waitpid failed: ") + std::strerror(errno));
      const double now = wall_now();
      if (now >= next_sample) {
        next_sample = now + policy.heartbeat_interval;
        const double last = std::max(launched, heartbeat_mtime(cmd.heartbeat).value_or(launched));
        if (now - last > policy.stall_timeout) {
          stalled = true;
          ::kill(pid, SIGKILL);
          while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
          }
          ++rec.stalls;
          log.append(cmd.stage, "stall", attempt, {{"silent_seconds", now - last}});
          break;
        }
      }
      std::this_thread::sleep_for(poll);
    }

    rec.last_exit_code = stalled ? -1 : decode_status(status);
    if (!stalled) log.append(cmd.stage, "exit", attempt, {{"exit_code", rec.last_exit_code}});
    const bool ok = !stalled && rec.last_exit_code == 0;
    if (ok) {
      rec.status = StageStatus::kSucceeded;
      break;
    }
    const bool may_restart = stalled ? policy.restart_on_stall : policy.restart_on_nonzero_exit;
    if (!may_restart || rec.restarts >= policy.max_restarts) {
      rec.status = StageStatus::kFailed;
      break;
    }
    ++rec.restarts;
    log.append(cmd.stage, "restart", attempt + 1, {{"reason", stalled ? "heartbeat_stall" : "nonzero_exit"}});
  }

  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  nlohmann::json detail = cmd.finish_detail;
  detail["status"] = stage_status_name(rec.status);
  detail["attempts"] = rec.attempts;
  detail["restarts"] = rec.restarts;
  log.append(cmd.stage, rec.status == StageStatus::kSucceeded ? "finish" : "give_up", rec.attempts, detail);
  return rec;
}

}  // namespace cosplan
