#include "irec/cli/run_dir.hpp"

#include <cstdio>

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "irec/common/error.hpp"
#include "irec/common/files.hpp"

namespace irec::cli {

namespace fs = std::filesystem;

RunDir::RunDir(fs::path dir, bool force)
    : dir_(std::move(dir)), lock_(dir_ / ".irec.lock"), force_(force) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw ConfigError(fmt::format("cannot create output directory {}: {}", dir_.string(), ec.message()));
  std::FILE* f = std::fopen(lock_.c_str(), "wx");
  if (f == nullptr) {
    throw ConfigError(fmt::format("output directory {} is in use (remove {} if stale)",
                                  dir_.string(), lock_.string()));
  }
  std::fclose(f);
}

RunDir::~RunDir() {
  std::error_code ec;
  fs::remove(lock_, ec);
}

void RunDir::claim(const std::vector<std::string>& names) const {
  if (force_) return;
  for (const auto& name : names) {
    if (fs::exists(dir_ / name)) {
      throw ConfigError(fmt::format("{} already exists; pass --force to overwrite",
                                    (dir_ / name).string()));
    }
  }
}

void RunDir::write(const std::string& name, std::string_view bytes) {
  write_file_atomic(dir_ / name, bytes);
  written_.push_back(name);
}

std::string manifest_name(std::string_view command) {
  return fmt::format("manifest_{}.json", command);
}

std::string manifest_json(const RunManifest& m) {
  const auto stamp = [](std::chrono::system_clock::time_point t) {
    return fmt::format("{:%FT%TZ}", std::chrono::floor<std::chrono::seconds>(t));
  };
  nlohmann::ordered_json doc;
  doc["command"] = m.command;
  doc["config_hash"] = m.config_hash;
  doc["seed"] = m.seed;
  doc["inputs"] = m.inputs;
  doc["outputs"] = m.outputs;
  doc["started_at"] = stamp(m.started);
  doc["finished_at"] = stamp(m.finished);
  return doc.dump(2) + "\n";
}

}  // namespace irec::cli
