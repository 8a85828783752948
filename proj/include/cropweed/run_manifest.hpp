#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cropweed {

struct ArtifactEntry {
  std::string path;   // relative to the manifest's directory
  std::string hash;   // fnv1a64 of the file bytes, 16 hex digits
  long long bytes = 0;
};

// Per-stage record of every artifact a run produced, with content hashes so
// later stages (and reruns) can verify inputs. Stored as run_manifest.json
// in the stage's output directory.
struct RunManifest {
  std::string stage;
  std::string timestamp;  // ISO 8601 UTC; excluded from byte-level compares
  uint64_t seed = 0;
  std::vector<ArtifactEntry> artifacts;
};

// Hashes dir/rel_path and appends an entry.
void add_artifact(RunManifest& m, const std::string& dir, const std::string& rel_path);

void write_run_manifest(const std::string& dir, const RunManifest& m);
RunManifest read_run_manifest(const std::string& path);

// Re-hashes every listed artifact; returns one message per mismatch or
// missing file (empty means the manifest verifies).
std::vector<std::string> verify_run_manifest(const std::string& path);

std::string hash_file_hex(const std::string& path);

}  // namespace cropweed
