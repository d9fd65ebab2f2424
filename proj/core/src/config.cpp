#include "cdisc/config.hpp"

#include <charconv>

#include "cdisc/error.hpp"
#include "text_io.hpp"

namespace cdisc {
namespace {

[[noreturn]] void bad(std::string_view key, std::string_view value, std::string_view want) {
  throw Error(Errc::config, "config key '" + std::string(key) + "': expected " + std::string(want) + ", got '" +
                                std::string(value) + "'");
}

std::uint64_t to_uint(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty()) bad(key, v, "a non-negative integer");
  return out;
}

}  // namespace

Config Config::parse(std::string_view text) {
  Config cfg;
  std::size_t line_no = 0;
  for (auto raw : detail::split_lines(text)) {
    ++line_no;
    auto line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(Errc::config, "config line " + std::to_string(line_no) + ": expected key=value");
    }
    auto key = detail::trim(line.substr(0, eq));
    if (key.empty()) throw Error(Errc::config, "config line " + std::to_string(line_no) + ": empty key");
    cfg.values_[std::string(key)] = std::string(detail::trim(line.substr(eq + 1)));
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) { return parse(detail::read_file(path)); }

std::string Config::get_string(std::string_view key, std::string_view fallback) const {
  auto it = values_.find(std::string(key));
  return it == values_.end() ? std::string(fallback) : it->second;
}

std::uint64_t Config::get_uint(std::string_view key, std::uint64_t fallback) const {
  auto it = values_.find(std::string(key));
  return it == values_.end() ? fallback : to_uint(key, it->second);
}

double Config::get_double(std::string_view key, double fallback) const {
  auto it = values_.find(std::string(key));
  if (it == values_.end()) return fallback;
  try {
    return detail::parse_double(it->second);
  } catch (const Error&) {
    bad(key, it->second, "a number");
  }
}

bool Config::get_bool(std::string_view key, bool fallback) const {
  auto it = values_.find(std::string(key));
  if (it == values_.end()) return fallback;
  const auto& v = it->second;
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad(key, v, "a boolean");
}

std::vector<std::string> Config::get_list(std::string_view key, const std::vector<std::string>& fallback) const {
  auto it = values_.find(std::string(key));
  if (it == values_.end()) return fallback;
  std::vector<std::string> out;
  std::string_view rest = it->second;
  while (true) {
    auto comma = rest.find(',');
    auto item = detail::trim(rest.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

std::vector<std::uint64_t> Config::get_uint_list(std::string_view key,
                                                 const std::vector<std::uint64_t>& fallback) const {
  if (!has(key)) return fallback;
  std::vector<std::uint64_t> out;
  for (const auto& item : get_list(key)) out.push_back(to_uint(key, item));
  if (out.empty()) bad(key, "", "at least one integer");
  return out;
}

void Config::require_known(const std::set<std::string>& known) const {
  std::string unknown;
  for (const auto& [k, v] : values_) {
    if (!known.count(k)) unknown += (unknown.empty() ? "" : ", ") + k;
  }
  if (!unknown.empty()) throw Error(Errc::config, "unknown config keys: " + unknown);
}

}  // namespace cdisc
