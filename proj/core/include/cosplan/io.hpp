// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <nlohmann/json_fwd.hpp>
#include <string>
#include <string_view>

namespace cosplan {

/// Whole-file read; throws Error when the file cannot be opened.
std::string read_text_file(const std::filesystem::path& path);

/// Writes `content` to a temp sibling, flushes, then renames over `path`.
void write_text_atomic(const std::filesystem::path& path, std::string_view content);

/// Pretty-printed JSON with a trailing newline, written atomically.
void write_json_atomic(const std::filesystem::path& path, const nlohmann::json& doc, int indent = 2);

nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace cosplan
