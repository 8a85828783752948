#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace cropweed {

// Flat key=value configuration: '#' comments, blank lines ignored, values
// may contain '='. Flags override by calling set() after from_file().
class KeyValueConfig {
 public:
  KeyValueConfig() = default;
  static KeyValueConfig from_file(const std::string& path);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string str(const std::string& key, const std::string& fallback) const;
  long long integer(const std::string& key, long long fallback) const;
  uint64_t u64(const std::string& key, uint64_t fallback) const;
  double real(const std::string& key, double fallback) const;
  bool boolean(const std::string& key, bool fallback) const;

  // All `prefix<name>=<count>` entries, e.g. budget totals from
  // `budget.crop_a=120` lines.
  std::map<std::string, long long> prefixed_counts(const std::string& prefix) const;

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace cropweed
