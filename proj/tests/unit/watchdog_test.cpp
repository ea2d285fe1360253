// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#include "cosplan/watchdog.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <map>
#include <thread>

#include "cosplan/errors.hpp"
#include "fixtures.hpp"

namespace cosplan {
namespace {

WatchdogPolicy fast_policy(int max_restarts) {
  WatchdogPolicy p;
  p.heartbeat_interval = 0.05;
  p.stall_timeout = 0.4;
  p.max_restarts = max_restarts;
  return p;
}

struct MockRun {
  StageRecord rec;
  int launches = 0;
  std::vector<nlohmann::json> events;

  [[nodiscard]] int count(const std::string& event) const {
    int n = 0;
    for (const auto& e : events) n += e["event"] == event;
    return n;
  }
};

MockRun run_mock(const std::string& mode, const WatchdogPolicy& policy) {
  testing::TempDir tmp("watchdog");
  const auto counter = tmp.path() / "count", heartbeat = tmp.path() / "hb";
  StageCommand cmd;
  cmd.stage = "mock";
  cmd.argv = {COSPLAN_MOCK_STAGE, mode, counter.string(), heartbeat.string()};
  cmd.heartbeat = heartbeat;
  EventLog log(tmp.path() / "events.jsonl");
  MockRun out;
  out.rec = run_stage(cmd, policy, log);
  std::ifstream(counter) >> out.launches;
  out.events = EventLog::read(log.path());
  return out;
}

// Every attempt after the first is preceded by exactly one restart event,
// and the child saw exactly as many launches as the record claims.
void expect_arithmetic(const MockRun& r) {
  EXPECT_EQ(r.rec.attempts, 1 + r.rec.restarts);
  EXPECT_EQ(r.count("restart"), r.rec.restarts);
  EXPECT_EQ(r.count("launch"), r.rec.attempts);
  EXPECT_EQ(r.launches, r.rec.attempts);
  EXPECT_EQ(r.count("finish") + r.count("give_up"), 1);
  EXPECT_EQ(r.events.back()["attempt"], r.rec.attempts);
}

TEST(Watchdog, CleanExitIsOneAttempt) {
  const MockRun r = run_mock("ok", fast_policy(2));
  EXPECT_EQ(r.rec.status, StageStatus::kSucceeded);
  EXPECT_EQ(r.rec.attempts, 1);
  EXPECT_EQ(r.rec.last_exit_code, 0);
  expect_arithmetic(r);
  EXPECT_EQ(r.events.back()["event"], "finish");
}

TEST(Watchdog, StallOnceRestartsOnce) {
  const MockRun r = run_mock("stall_once", fast_policy(2));
  EXPECT_EQ(r.rec.status, StageStatus::kSucceeded);
  EXPECT_EQ(r.rec.attempts, 2);
  EXPECT_EQ(r.rec.restarts, 1);
  EXPECT_EQ(r.rec.stalls, 1);
  expect_arithmetic(r);
  EXPECT_EQ(r.count("stall"), 1);
}

TEST(Watchdog, PersistentFailureUsesEveryRestart) {
  const MockRun r = run_mock("fail", fast_policy(3));
  EXPECT_EQ(r.rec.status, StageStatus::kFailed);
  EXPECT_EQ(r.rec.attempts, 4);
  EXPECT_EQ(r.rec.restarts, 3);
  EXPECT_EQ(r.rec.last_exit_code, 1);
  expect_arithmetic(r);
  EXPECT_EQ(r.events.back()["event"], "give_up");
}

TEST(Watchdog, RecoversAfterTransientFailures) {
  for (int until : {1, 2, 3}) {
    const MockRun r = run_mock("fail_until_" + std::to_string(until), fast_policy(2));
    EXPECT_EQ(r.rec.status, StageStatus::kSucceeded) << until;
    EXPECT_EQ(r.rec.attempts, until);
    expect_arithmetic(r);
  }
  const MockRun r = run_mock("fail_until_4", fast_policy(2));
  EXPECT_EQ(r.rec.status, StageStatus::kFailed);
  EXPECT_EQ(r.rec.attempts, 3);
}

TEST(Watchdog, RestartSwitchesAreHonoured) {
  WatchdogPolicy p = fast_policy(5);
  p.restart_on_nonzero_exit = false;
  const MockRun failed = run_mock("fail", p);
  EXPECT_EQ(failed.rec.attempts, 1);
  p.restart_on_stall = false;
  const MockRun stalled = run_mock("stall", p);
  EXPECT_EQ(stalled.rec.attempts, 1);
  EXPECT_EQ(stalled.rec.stalls, 1);
  EXPECT_EQ(stalled.rec.status, StageStatus::kFailed);
}

TEST(Watchdog, PolicyValidation) {
  WatchdogPolicy p;
  p.stall_timeout = 1.0;
  p.heartbeat_interval = 2.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = WatchdogPolicy{};
  p.max_restarts = -1;
  EXPECT_THROW(p.validate(), ConfigError);
  EventLog log(std::filesystem::temp_directory_path() / "cosplan_unused.jsonl");
  StageCommand empty;
  empty.stage = "empty";
  empty.heartbeat = "hb";
  EXPECT_THROW(run_stage(empty, WatchdogPolicy{}, log), ConfigError);
}

TEST(EventLog, SkipsMalformedLines) {
  testing::TempDir tmp("events");
  const auto path = tmp.path() / "events.jsonl";
  {
    EventLog log(path);
    log.append("a", "launch", 1);
    log.append("a", "exit", 1, {{"exit_code", 0}});
  }
  std::ofstream(path, std::ios::app) << "{truncated\n";
  const auto events = EventLog::read(path);
  ASSERT_EQ(events.size(), 2u);
  EXPECT_EQ(events[1]["detail"]["exit_code"], 0);
  for (const char* key : {"ts", "stage", "event", "attempt", "detail"}) EXPECT_TRUE(events[0].contains(key)) << key;
}

TEST(Heartbeat, WriterKeepsFileFresh) {
  testing::TempDir tmp("heartbeat");
  const auto path = tmp.path() / "hb";
  std::filesystem::file_time_type first;
  {
    HeartbeatWriter w(path, 0.05);
    ASSERT_TRUE(std::filesystem::exists(path));
    first = std::filesystem::last_write_time(path);
    std::this_thread::sleep_for(std::chrono::milliseconds(200));
    EXPECT_GT(std::filesystem::last_write_time(path), first);
  }
}

}  // namespace
}  // namespace cosplan
