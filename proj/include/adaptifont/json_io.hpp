#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace adaptifont {

using Json = nlohmann::json;

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& doc, int indent = -1);

/// Reads a JSON-lines file; blank lines are skipped.
std::vector<Json> read_json_lines(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace adaptifont
