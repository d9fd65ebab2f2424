#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace cdisc {

// Flat "key=value" settings with dotted section prefixes
// (embedding.dim=300). '#' starts a comment line; later keys override
// earlier ones. Typed getters throw Errc::config naming the key.
class Config {
 public:
  static Config parse(std::string_view text);
  static Config load(const std::filesystem::path& path);

  bool has(std::string_view key) const { return values_.count(std::string(key)) > 0; }
  void set(std::string key, std::string value) { values_[std::move(key)] = std::move(value); }
  const std::map<std::string, std::string>& values() const { return values_; }

  std::string get_string(std::string_view key, std::string_view fallback = {}) const;
  std::uint64_t get_uint(std::string_view key, std::uint64_t fallback) const;
  double get_double(std::string_view key, double fallback) const;
  bool get_bool(std::string_view key, bool fallback) const;
  // Comma separated; surrounding blanks trimmed, empty items removed.
  std::vector<std::string> get_list(std::string_view key, const std::vector<std::string>& fallback = {}) const;
  std::vector<std::uint64_t> get_uint_list(std::string_view key, const std::vector<std::uint64_t>& fallback) const;

  // Errc::config listing every key outside `known`.
  void require_known(const std::set<std::string>& known) const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace cdisc
