#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace glyphlab {

struct ArtifactChecksum {
  std::string path;      // relative to the output directory
  std::string checksum;  // fnv1a64 of the file bytes, hex
};

/// Reproducibility record written at the root of every output directory.
/// The config snapshot is sufficient to regenerate each artifact bit-exactly.
struct RunManifest {
  std::string tool_version;
  std::string command;
  std::uint64_t seed = 0;
  std::string config_snapshot;  // canonical JSON text
  std::string started_at;       // ISO-8601 UTC
  std::string finished_at;
  std::vector<std::string> notes;  // measurement conventions in force
  std::vector<ArtifactChecksum> artifacts;
};

std::string checksum_file(const std::string& path);

/// Builds checksums for `files` (relative to `directory`) and writes
/// manifest.json there.
void write_manifest(RunManifest manifest, const std::string& directory,
                    const std::vector<std::string>& files);

RunManifest read_manifest(const std::string& path);

std::string iso8601_now();

}  // namespace glyphlab
