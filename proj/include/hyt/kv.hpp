#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace hyt {

/// Flat, ordered key/value settings: the config file format, checkpoint header
/// and manifest payload all use it.
using KeyValues = std::map<std::string, std::string>;

/// Parses "key = value" lines; '#' starts a comment line, blank lines are
/// skipped. Throws std::runtime_error (with line number) on a line without '='.
KeyValues parse_kv(std::string_view text, std::string_view source = "<config>");
KeyValues read_kv_file(const std::filesystem::path& file);
/// One "key = value" line per entry, in key order.
std::string format_kv(const KeyValues& kv);

/// Typed lookups; leave `out` untouched when the key is absent and throw
/// std::invalid_argument naming the key when the value does not parse.
bool kv_get(const KeyValues& kv, const std::string& key, bool& out);
bool kv_get(const KeyValues& kv, const std::string& key, double& out);
bool kv_get(const KeyValues& kv, const std::string& key, float& out);
bool kv_get(const KeyValues& kv, const std::string& key, std::uint64_t& out);
bool kv_get(const KeyValues& kv, const std::string& key, std::string& out);

std::string kv_str(bool v);
std::string kv_str(double v);
std::string kv_str(std::uint64_t v);

}  // namespace hyt
