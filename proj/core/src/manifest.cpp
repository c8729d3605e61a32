#include "glyphlab/manifest.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "glyphlab/rng.hpp"
#include "glyphlab/version.hpp"

namespace glyphlab {

std::string checksum_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checksum_file: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string bytes = ss.str();
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes.data(), bytes.size())));
  return buf;
}

std::string iso8601_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest(RunManifest manifest, const std::string& directory,
                    const std::vector<std::string>& files) {
  manifest.tool_version = kVersion;
  for (const auto& f : files) {
    manifest.artifacts.push_back({f, checksum_file(directory + "/" + f)});
  }

  nlohmann::json j;
  j["tool_version"] = manifest.tool_version;
  j["command"] = manifest.command;
  j["seed"] = manifest.seed;
  j["config"] = nlohmann::json::parse(
      manifest.config_snapshot.empty() ? "{}" : manifest.config_snapshot);
  j["started_at"] = manifest.started_at;
  j["finished_at"] = manifest.finished_at;
  if (!manifest.notes.empty()) j["notes"] = manifest.notes;
  j["artifacts"] = nlohmann::json::array();
  for (const auto& a : manifest.artifacts) {
    j["artifacts"].push_back({{"path", a.path}, {"checksum", a.checksum}});
  }

  std::ofstream out(directory + "/manifest.json", std::ios::binary);
  if (!out) throw std::runtime_error("write_manifest: cannot open manifest.json");
  out << j.dump(2) << "\n";
}

RunManifest read_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_manifest: cannot open " + path);
  nlohmann::json j;
  in >> j;
  RunManifest m;
  m.tool_version = j.value("tool_version", "");
  m.command = j.value("command", "");
  m.seed = j.value("seed", std::uint64_t{0});
  m.config_snapshot = j.contains("config") ? j["config"].dump(2) + "\n" : "";
  m.started_at = j.value("started_at", "");
  m.finished_at = j.value("finished_at", "");
  if (j.contains("notes")) m.notes = j["notes"].get<std::vector<std::string>>();
  if (j.contains("artifacts")) {
    for (const auto& a : j["artifacts"]) {
      m.artifacts.push_back({a.at("path").get<std::string>(),
                             a.at("checksum").get<std::string>()});
    }
  }
  return m;
}

}  // namespace glyphlab
