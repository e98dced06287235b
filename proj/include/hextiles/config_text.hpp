#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace hextiles {

/// Parses the TOML subset used by variable-spec and tileset config files into
/// a JSON tree: [table] and [[array-of-tables]] headers, dotted keys, basic
/// and literal strings, integers, floats, booleans, (nested, multi-line)
/// arrays and inline tables. Errors carry "source:line".
nlohmann::json parse_config_text(std::string_view text, std::string_view source = "<config>");

nlohmann::json read_config_file(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace hextiles
