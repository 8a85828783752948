#include "cropweed/run_manifest.hpp"

#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

#include "cropweed/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace cropweed {

std::string hash_file_hex(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot hash missing file: " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes.data(), bytes.size())));
  return buf;
}

void add_artifact(RunManifest& m, const std::string& dir, const std::string& rel_path) {
  fs::path full = fs::path(dir) / rel_path;
  ArtifactEntry e;
  e.path = rel_path;
  e.hash = hash_file_hex(full.string());
  e.bytes = static_cast<long long>(fs::file_size(full));
  m.artifacts.push_back(std::move(e));
}

namespace {
std::string utc_now() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}
}  // namespace

void write_run_manifest(const std::string& dir, const RunManifest& m) {
  json doc;
  doc["stage"] = m.stage;
  doc["timestamp"] = m.timestamp.empty() ? utc_now() : m.timestamp;
  doc["seed"] = m.seed;
  json arts = json::array();
  for (const ArtifactEntry& e : m.artifacts)
    arts.push_back({{"path", e.path}, {"hash", e.hash}, {"bytes", e.bytes}});
  doc["artifacts"] = arts;
  std::ofstream out(fs::path(dir) / "run_manifest.json", std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write run manifest in " + dir);
  out << doc.dump(2) << '\n';
}

RunManifest read_run_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open run manifest: " + path);
  json doc = json::parse(in);
  RunManifest m;
  m.stage = doc.at("stage").get<std::string>();
  m.timestamp = doc.at("timestamp").get<std::string>();
  m.seed = doc.at("seed").get<uint64_t>();
  for (const json& e : doc.at("artifacts"))
    m.artifacts.push_back({e.at("path").get<std::string>(), e.at("hash").get<std::string>(),
                           e.at("bytes").get<long long>()});
  return m;
}

std::vector<std::string> verify_run_manifest(const std::string& path) {
  RunManifest m = read_run_manifest(path);
  fs::path dir = fs::path(path).parent_path();
  std::vector<std::string> problems;
  for (const ArtifactEntry& e : m.artifacts) {
    fs::path full = dir / e.path;
    if (!fs::exists(full)) {
      problems.push_back("missing artifact: " + e.path);
      continue;
    }
    std::string actual = hash_file_hex(full.string());
    if (actual != e.hash)
      problems.push_back("hash mismatch for " + e.path + ": manifest " + e.hash + ", file " +
                         actual);
  }
  return problems;
}

}  // namespace cropweed
