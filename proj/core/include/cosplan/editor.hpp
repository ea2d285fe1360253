// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace cosplan {

struct EditorSessionConfig {
  std::filesystem::path grid_mask;  ///< grid_mask.png
  std::filesystem::path grid_meta;  ///< grid_meta.json
  std::filesystem::path out;        ///< roi_polygon.json destination
  std::string host = "127.0.0.1";
  int port = 0;  ///< 0 picks a free port
  /// Browser app files served under "/" when set.
  std::optional<std::filesystem::path> static_dir;
};

/// Local HTTP session for the polygon editor.
///
///   GET  /grid/mask.png   backdrop bytes
///   GET  /grid/meta.json  grid spec
///   POST /roi             roi_polygon.json body; 422 with {"error","message"}
///                         when invalid (nothing written), 200 when persisted
///   POST /close           ends the session
class EditorSession {
 public:
  virtual ~EditorSession() = default;
  [[nodiscard]] virtual int port() const = 0;
  /// Blocks until POST /close or stop().
  virtual void wait() = 0;
  virtual void stop() = 0;
  /// Number of polygons persisted during the session.
  [[nodiscard]] virtual int saves() const = 0;
};

/// Checks that the grid artifacts exist and the meta parses, binds the port
/// and starts serving on a background thread. Throws ResourceError if the
/// port cannot be bound.
std::unique_ptr<EditorSession> serve_editor_session(const EditorSessionConfig& cfg);

}  // namespace cosplan
