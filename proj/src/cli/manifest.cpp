#include "hyt/cli/manifest.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#ifndef HYT_VERSION
#define HYT_VERSION "0.0.0"
#endif

namespace hyt::cli {

std::string version_string() { return HYT_VERSION; }

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["data"] = data;
  j["seed"] = seed;
  j["dataset_checksum"] = dataset_checksum;
  j["version"] = version;
  j["started"] = started;
  j["finished"] = finished;
  j["status"] = status;
  j["config"] = config;
  j["outputs"] = outputs;
  return j.dump(2) + "\n";
}

RunManifest RunManifest::from_json(const std::string& text) {
  RunManifest m;
  try {
    const auto j = nlohmann::json::parse(text);
    m.command = j.value("command", "");
    m.data = j.value("data", "");
    m.seed = j.value("seed", std::uint64_t{0});
    m.dataset_checksum = j.value("dataset_checksum", "");
    m.version = j.value("version", "");
    m.started = j.value("started", "");
    m.finished = j.value("finished", "");
    m.status = j.value("status", "");
    if (j.contains("config")) m.config = j.at("config").get<KeyValues>();
    if (j.contains("outputs")) m.outputs = j.at("outputs").get<std::map<std::string, std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

void RunManifest::save(const std::filesystem::path& file) const {
  const auto tmp = std::filesystem::path(file.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << to_json();
  }
  std::filesystem::rename(tmp, file);
}

RunManifest RunManifest::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open manifest " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

RunLock::RunLock(const std::filesystem::path& dir) : file_(dir / ".lock") {
  std::filesystem::create_directories(dir);
  const int fd = ::open(file_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd < 0) {
    if (errno == EEXIST)
      throw std::runtime_error("output directory " + dir.string() + " is locked by another run (remove " +
                               file_.string() + " if that run is gone)");
    throw std::runtime_error("cannot create " + file_.string() + ": " + std::strerror(errno));
  }
  const auto pid = std::to_string(::getpid()) + "\n";
  [[maybe_unused]] const auto written = ::write(fd, pid.data(), pid.size());
  ::close(fd);
}

RunLock::~RunLock() {
  std::error_code ec;
  std::filesystem::remove(file_, ec);
}

}  // namespace hyt::cli
