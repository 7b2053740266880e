#include "lrsim/config.hpp"

#include <algorithm>
#include <sstream>

#include "lrsim/errors.hpp"
#include "lrsim/io.hpp"

namespace lrsim {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::parse(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    cfg.values_[key] = trim(line.substr(eq + 1));
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("config file not found: " + path.string());
  return parse(read_text(path));
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

std::string Config::require_string(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing required config key '" + key + "'");
  return it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    return parse_double(it->second);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' is not a number: " + it->second);
  }
}

long Config::get_long(const std::string& key, long fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(it->second, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != it->second.size()) {
    throw ConfigError("config key '" + key + "' is not an integer: " + it->second);
  }
  return v;
}

std::uint64_t Config::require_u64(const std::string& key) const {
  const std::string s = require_string(key);
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || s.front() == '-') {
    throw ConfigError("config key '" + key + "' is not an unsigned integer: " + s);
  }
  return v;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second == "true" || it->second == "1" || it->second == "yes") return true;
  if (it->second == "false" || it->second == "0" || it->second == "no") return false;
  throw ConfigError("config key '" + key + "' is not a boolean: " + it->second);
}

std::vector<double> Config::get_doubles(const std::string& key) const {
  std::vector<double> out;
  auto it = values_.find(key);
  if (it == values_.end()) return out;
  for (const auto& piece : split(it->second, ',')) {
    const std::string p = trim(piece);
    try {
      out.push_back(parse_double(p));
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "' has a non-numeric entry: " + p);
    }
  }
  return out;
}

std::vector<long> Config::get_longs(const std::string& key) const {
  std::vector<long> out;
  for (double v : get_doubles(key)) {
    if (v != static_cast<double>(static_cast<long>(v))) throw ConfigError("config key '" + key + "' needs integers");
    out.push_back(static_cast<long>(v));
  }
  return out;
}

void Config::check_known(const std::set<std::string>& known) const {
  std::string unknown;
  for (const auto& [k, v] : values_) {
    if (!known.count(k)) unknown += (unknown.empty() ? "" : ", ") + k;
  }
  if (!unknown.empty()) throw ConfigError("unknown config keys: " + unknown);
}

}  // namespace lrsim
