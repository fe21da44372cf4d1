#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace irec::cli {

// Exclusive use of an output directory for one command. Creates the directory
// and a lock file; a second holder fails with ConfigError until release.
class RunDir {
 public:
  RunDir(std::filesystem::path dir, bool force);
  ~RunDir();
  RunDir(const RunDir&) = delete;
  RunDir& operator=(const RunDir&) = delete;

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path path(std::string_view name) const { return dir_ / name; }

  // Throws ConfigError if any of the named artifacts exists and force is off.
  void claim(const std::vector<std::string>& names) const;
  // Atomic write of a claimed artifact; remembered for the manifest.
  void write(const std::string& name, std::string_view bytes);
  const std::vector<std::string>& written() const { return written_; }

 private:
  std::filesystem::path dir_;
  std::filesystem::path lock_;
  bool force_;
  std::vector<std::string> written_;
};

struct RunManifest {
  std::string command;
  std::string config_hash;
  std::map<std::string, std::string> inputs;  // name -> sha256
  std::uint64_t seed = 0;
  std::chrono::system_clock::time_point started;
  std::chrono::system_clock::time_point finished;
  std::vector<std::string> outputs;
};

std::string manifest_json(const RunManifest& manifest);
std::string manifest_name(std::string_view command);

}  // namespace irec::cli
