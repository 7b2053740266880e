#pragma once

// Flat "section.key = value" configuration files. '#' starts a comment;
// blank lines are ignored; a later assignment to the same key wins.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace lrsim {

class Config {
 public:
  static Config parse(const std::string& text);
  static Config load(const std::filesystem::path& path);

  bool contains(const std::string& key) const { return values_.count(key) > 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::string require_string(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key, long fallback) const;
  std::uint64_t require_u64(const std::string& key) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<long> get_longs(const std::string& key) const;

  /// Throws ConfigError listing keys outside `known`.
  void check_known(const std::set<std::string>& known) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace lrsim
