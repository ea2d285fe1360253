// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#include "cosplan/editor.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <nlohmann/json.hpp>
#include <thread>

#include "cosplan/errors.hpp"
#include "cosplan/io.hpp"
#include "cosplan/occupancy.hpp"
#include "cosplan/polygon.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

// After Eigen: <resolv.h>, pulled in by httplib, defines a `_res` macro.
#include <httplib.h>

namespace cosplan {
namespace {

namespace fs = std::filesystem;

class EditorTest : public ::testing::Test {
 protected:
  EditorTest() : tmp_("editor") {
    const OccupancyGrid grid = testing::random_grid(3, 50, 50, 0.1);
    write_grid_mask_png(grid, tmp_.path() / "grid_mask.png");
    write_json_atomic(tmp_.path() / "grid_meta.json", grid_spec_to_json(grid.spec));
    fs::create_directories(tmp_.path() / "app");
    std::ofstream(tmp_.path() / "app" / "index.html") << "<html>editor</html>";
    cfg_.grid_mask = tmp_.path() / "grid_mask.png";
    cfg_.grid_meta = tmp_.path() / "grid_meta.json";
    cfg_.out = tmp_.path() / "roi_polygon.json";
    cfg_.static_dir = tmp_.path() / "app";
  }

  static std::string fixture(const std::string& name) { return read_text_file(fs::path(COSPLAN_FIXTURE_DIR) / name); }

  testing::TempDir tmp_;
  EditorSessionConfig cfg_;
};

TEST_F(EditorTest, ServesGridArtifacts) {
  const auto session = serve_editor_session(cfg_);
  httplib::Client cli(cfg_.host, session->port());
  const auto mask = cli.Get("/grid/mask.png");
  ASSERT_TRUE(mask);
  EXPECT_EQ(mask->status, 200);
  EXPECT_EQ(mask->get_header_value("Content-Type"), "image/png");
  EXPECT_EQ(mask->body, read_text_file(cfg_.grid_mask));
  const auto meta = cli.Get("/grid/meta.json");
  ASSERT_TRUE(meta);
  EXPECT_EQ(nlohmann::json::parse(meta->body), read_json_file(cfg_.grid_meta));
  const auto index = cli.Get("/index.html");
  ASSERT_TRUE(index);
  EXPECT_EQ(index->body, "<html>editor</html>");
}

TEST_F(EditorTest, PersistsValidPolygonAndRejectsInvalid) {
  const auto session = serve_editor_session(cfg_);
  httplib::Client cli(cfg_.host, session->port());
  const std::string good = fixture("roi_square_hole.json");
  const auto ok = cli.Post("/roi", good, "application/json");
  ASSERT_TRUE(ok);
  EXPECT_EQ(ok->status, 200);
  EXPECT_EQ(nlohmann::json::parse(ok->body)["holes"], 1);
  EXPECT_EQ(roi_to_json(load_roi_file(cfg_.out)), roi_to_json(parse_roi(good)));
  const std::string saved = read_text_file(cfg_.out);

  struct Case {
    std::string body, error;
  };
  const std::vector<Case> bad{
      {fixture("roi_bowtie.json"), "validation"},
      {fixture("roi_open.json"), "validation"},
      {R"({"closed": true, "points_world": [[0,0],[10,0],[10,10],[0,10]],
           "holes": [[[20,20],[22,20],[22,22],[20,22]]]})",
       "validation"},
      {"{\"points_world\": ", "parse"},
  };
  for (const auto& c : bad) {
    const auto res = cli.Post("/roi", c.body, "application/json");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 422) << c.body;
    const auto doc = nlohmann::json::parse(res->body);
    EXPECT_EQ(doc["error"], c.error);
    EXPECT_FALSE(doc["message"].get<std::string>().empty());
  }
  // Rejected posts leave the last good polygon in place.
  EXPECT_EQ(read_text_file(cfg_.out), saved);
  EXPECT_EQ(session->saves(), 1);
}

TEST_F(EditorTest, CloseEndsTheSession) {
  const auto session = serve_editor_session(cfg_);
  std::thread waiter([&] { session->wait(); });
  httplib::Client cli(cfg_.host, session->port());
  const auto res = cli.Post("/close", "", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(nlohmann::json::parse(res->body)["closed"], true);
  waiter.join();
  EXPECT_FALSE(cli.Get("/grid/meta.json"));
}

TEST_F(EditorTest, MissingArtifactsAndBusyPort) {
  EditorSessionConfig broken = cfg_;
  broken.grid_meta = tmp_.path() / "absent.json";
  EXPECT_THROW(serve_editor_session(broken), Error);
  const auto first = serve_editor_session(cfg_);
  EditorSessionConfig clash = cfg_;
  clash.port = first->port();
  EXPECT_THROW(serve_editor_session(clash), ResourceError);
}

}  // namespace
}  // namespace cosplan
