#include "hyt/kv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hyt {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* type) {
  throw std::invalid_argument("setting '" + key + "': '" + value + "' is not a valid " + type);
}

}  // namespace

KeyValues parse_kv(std::string_view text, std::string_view source) {
  KeyValues kv;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw std::runtime_error(std::string(source) + ":" + std::to_string(line_no) + ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw std::runtime_error(std::string(source) + ":" + std::to_string(line_no) + ": empty key");
    kv[std::string(key)] = std::string(trim(line.substr(eq + 1)));
  }
  return kv;
}

KeyValues read_kv_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open config " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_kv(buf.str(), file.string());
}

std::string format_kv(const KeyValues& kv) {
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

bool kv_get(const KeyValues& kv, const std::string& key, bool& out) {
  auto it = kv.find(key);
  if (it == kv.end()) return false;
  const auto& v = it->second;
  if (v == "true" || v == "1" || v == "yes" || v == "on") out = true;
  else if (v == "false" || v == "0" || v == "no" || v == "off") out = false;
  else bad_value(key, v, "boolean");
  return true;
}

bool kv_get(const KeyValues& kv, const std::string& key, double& out) {
  auto it = kv.find(key);
  if (it == kv.end()) return false;
  const auto& v = it->second;
  double parsed = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), parsed);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, v, "number");
  out = parsed;
  return true;
}

bool kv_get(const KeyValues& kv, const std::string& key, float& out) {
  double d = out;
  if (!kv_get(kv, key, d)) return false;
  out = static_cast<float>(d);
  return true;
}

bool kv_get(const KeyValues& kv, const std::string& key, std::uint64_t& out) {
  auto it = kv.find(key);
  if (it == kv.end()) return false;
  const auto& v = it->second;
  std::uint64_t parsed = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), parsed);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, v, "non-negative integer");
  out = parsed;
  return true;
}

bool kv_get(const KeyValues& kv, const std::string& key, std::string& out) {
  auto it = kv.find(key);
  if (it == kv.end()) return false;
  out = it->second;
  return true;
}

std::string kv_str(bool v) { return v ? "true" : "false"; }

std::string kv_str(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string kv_str(std::uint64_t v) { return std::to_string(v); }

}  // namespace hyt
