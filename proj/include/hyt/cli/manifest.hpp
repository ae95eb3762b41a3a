#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "hyt/kv.hpp"

namespace hyt::cli {

std::string version_string();
/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

/// Record of one run: written before work starts, finalized at the end.
struct RunManifest {
  std::string command;
  std::string data;
  KeyValues config;
  std::uint64_t seed = 0;
  std::string dataset_checksum;  // 16 hex digits
  std::string version;
  std::string started;
  std::string finished;  // empty while running
  std::string status;    // running, ok, diverged, failed
  std::map<std::string, std::string> outputs;

  std::string to_json() const;
  static RunManifest from_json(const std::string& text);

  void save(const std::filesystem::path& file) const;
  static RunManifest load(const std::filesystem::path& file);
};

/// Exclusive lock on an output directory, held as a `.lock` file for the
/// lifetime of the object.
class RunLock {
 public:
  /// Creates the directory if needed. Throws std::runtime_error if another
  /// run already holds the lock.
  explicit RunLock(const std::filesystem::path& dir);
  ~RunLock();
  RunLock(const RunLock&) = delete;
  RunLock& operator=(const RunLock&) = delete;

 private:
  std::filesystem::path file_;
};

}  // namespace hyt::cli
