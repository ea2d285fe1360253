// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#include "cosplan/editor.hpp"

#include <atomic>
#include <nlohmann/json.hpp>
#include <thread>

#include "cosplan/errors.hpp"
#include "cosplan/io.hpp"
#include "cosplan/occupancy.hpp"
#include "cosplan/polygon.hpp"

// After Eigen: <resolv.h>, pulled in by httplib, defines a `_res` macro.
#include <httplib.h>

namespace cosplan {
namespace {

void reply_json(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

class HttpEditorSession final : public EditorSession {
 public:
  explicit HttpEditorSession(const EditorSessionConfig& cfg) : cfg_(cfg) {
    mask_ = read_text_file(cfg.grid_mask);
    const auto meta = read_json_file(cfg.grid_meta);
    grid_spec_from_json(meta);  // validates
    meta_ = meta.dump(2);
    routes();
    // httplib defaults to SO_REUSEPORT, which would let a second session
    // silently share the port. A clash must fail instead.
    server_.set_socket_options([](socket_t sock) {
      int yes = 1;
      ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    port_ = cfg.port == 0 ? server_.bind_to_any_port(cfg.host) : (server_.bind_to_port(cfg.host, cfg.port) ? cfg.port : -1);
    if (port_ <= 0) throw ResourceError("cannot bind editor endpoint on " + cfg.host + ":" + std::to_string(cfg.port));
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~HttpEditorSession() override {
    stop();
    if (thread_.joinable()) thread_.join();
  }

  [[nodiscard]] int port() const override { return port_; }
  [[nodiscard]] int saves() const override { return saves_.load(); }

  void wait() override {
    if (thread_.joinable()) thread_.join();
  }

  void stop() override { server_.stop(); }

 private:
  void routes() {
    server_.Get("/grid/mask.png", [this](const httplib::Request&, httplib::Response& res) {
      res.set_content(mask_, "image/png");
    });
    server_.Get("/grid/meta.json", [this](const httplib::Request&, httplib::Response& res) {
      res.set_content(meta_, "application/json");
    });
    server_.Post("/roi", [this](const httplib::Request& req, httplib::Response& res) {
      RoiPolygon roi;
      try {
        roi = parse_roi(req.body);
      } catch (const ParseError& e) {
        return reply_json(res, 422, {{"error", "parse"}, {"message", e.what()}});
      } catch (const ValidationError& e) {
        return reply_json(res, 422, {{"error", "validation"}, {"message", e.what()}});
      }
      try {
        write_roi_file_atomic(roi, cfg_.out);
      } catch (const Error& e) {
        return reply_json(res, 500, {{"error", "io"}, {"message", e.what()}});
      }
      ++saves_;
      reply_json(res, 200, {{"saved", cfg_.out.string()}, {"holes", roi.holes.size()}});
    });
    server_.Post("/close", [this](const httplib::Request&, httplib::Response& res) {
      reply_json(res, 200, {{"closed", true}, {"saves", saves_.load()}});
      // Only closes the listening socket; in-flight responses still complete.
      server_.stop();
    });
    if (cfg_.static_dir) server_.set_mount_point("/", cfg_.static_dir->string());
  }

  EditorSessionConfig cfg_;
  std::string mask_;
  std::string meta_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = -1;
  std::atomic<int> saves_{0};
};

}  // namespace

std::unique_ptr<EditorSession> serve_editor_session(const EditorSessionConfig& cfg) {
  return std::make_unique<HttpEditorSession>(cfg);
}

}  // namespace cosplan
