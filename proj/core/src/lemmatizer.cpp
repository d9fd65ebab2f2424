#include <algorithm>
#include <set>

#include "cdisc/default_data.hpp"
#include "cdisc/error.hpp"
#include "cdisc/preprocess.hpp"
#include "text_io.hpp"

namespace cdisc {

namespace {

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool is_consonant(std::string_view s, std::size_t i) {
  switch (s[i]) {
    case 'a': case 'e': case 'i': case 'o': case 'u':
      return false;
    case 'y':
      return i == 0 || !is_consonant(s, i - 1);
    default:
      return true;
  }
}

bool has_vowel(std::string_view s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!is_consonant(s, i)) return true;
  }
  return false;
}

// Number of vowel-consonant sequences, [C](VC){m}[V].
int measure(std::string_view s) {
  int m = 0;
  std::size_t i = 0;
  const std::size_t n = s.size();
  while (i < n && is_consonant(s, i)) ++i;
  while (i < n) {
    while (i < n && !is_consonant(s, i)) ++i;
    if (i >= n) break;
    while (i < n && is_consonant(s, i)) ++i;
    ++m;
  }
  return m;
}

bool ends_cvc(std::string_view s) {
  const std::size_t n = s.size();
  if (n < 3) return false;
  char last = s[n - 1];
  return is_consonant(s, n - 3) && !is_consonant(s, n - 2) && is_consonant(s, n - 1) &&
         last != 'w' && last != 'x' && last != 'y';
}

// Repairs a stem left behind by removing -ing/-ed.
std::string restore_stem(std::string stem) {
  const std::size_t n = stem.size();
  if (n >= 2 && stem[n - 1] == stem[n - 2] && is_consonant(stem, n - 1)) {
    char c = stem[n - 1];
    if (c != 'l' && c != 's' && c != 'z') stem.pop_back();
    return stem;
  }
  if (measure(stem) == 1 && ends_cvc(stem)) stem.push_back('e');
  return stem;
}

std::string apply_rules(const std::string& w) {
  const std::size_t n = w.size();
  if (n <= 3) return w;

  if (ends_with(w, "ies") && n > 4) return w.substr(0, n - 3) + "y";
  if (ends_with(w, "sses")) return w.substr(0, n - 2);
  if (ends_with(w, "ches") || ends_with(w, "shes") || ends_with(w, "xes") || ends_with(w, "zzes")) {
    return w.substr(0, n - 2);
  }
  if (ends_with(w, "oes") && n >= 7) return w.substr(0, n - 2);
  if (ends_with(w, "s")) {
    if (ends_with(w, "ss") || ends_with(w, "us") || ends_with(w, "is")) return w;
    return w.substr(0, n - 1);
  }

  if (ends_with(w, "ing") && n >= 6) {
    auto stem = w.substr(0, n - 3);
    if (has_vowel(stem)) return restore_stem(std::move(stem));
    return w;
  }

  if (ends_with(w, "eed")) return w;
  if (ends_with(w, "ied") && n > 4) return w.substr(0, n - 3) + "y";
  if (ends_with(w, "ed") && n >= 5) {
    auto stem = w.substr(0, n - 2);
    if (has_vowel(stem)) return restore_stem(std::move(stem));
  }
  return w;
}

bool is_lower_alpha(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

}  // namespace

Lemmatizer::Lemmatizer(const std::vector<std::pair<std::string, std::string>>& exceptions) {
  std::unordered_map<std::string, std::string> raw;
  for (const auto& [form, lemma] : exceptions) {
    if (!is_lower_alpha(form) || !is_lower_alpha(lemma)) {
      throw Error(Errc::parse, "lemma exception entries must be lowercase alphabetic: '" + form +
                                   "' -> '" + lemma + "'");
    }
    raw[form] = lemma;
  }
  for (const auto& [form, lemma] : raw) {
    std::string target = lemma;
    std::set<std::string> seen{form};
    while (true) {
      auto it = raw.find(target);
      if (it == raw.end() || it->second == target) break;
      if (!seen.insert(target).second) {
        throw Error(Errc::parse, "cyclic lemma exceptions involving '" + form + "'");
      }
      target = it->second;
    }
    exceptions_[form] = target;
    protected_.insert(target);
  }
}

Lemmatizer Lemmatizer::parse(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::size_t line_no = 0;
  for (auto line : detail::split_lines(text)) {
    ++line_no;
    line = detail::trim(line);
    if (line.empty() || line.front() == '#') continue;
    auto parts = detail::split_whitespace(line);
    if (parts.size() != 2) {
      throw Error(Errc::parse, "lemma exceptions line " + std::to_string(line_no) +
                                   ": expected '<inflected> <lemma>'");
    }
    entries.emplace_back(std::string(parts[0]), std::string(parts[1]));
  }
  return Lemmatizer(entries);
}

Lemmatizer Lemmatizer::load(const std::filesystem::path& path) { return parse(detail::read_file(path)); }

Lemmatizer Lemmatizer::builtin() { return parse(default_data::lemma_exceptions()); }

bool Lemmatizer::is_fixed_point(const std::string& word) const {
  if (auto it = exceptions_.find(word); it != exceptions_.end()) return it->second == word;
  if (protected_.count(word)) return true;
  return apply_rules(word) == word;
}

std::string Lemmatizer::lemma(std::string_view word) const {
  std::string w(word);
  if (auto it = exceptions_.find(w); it != exceptions_.end()) return it->second;
  if (protected_.count(w)) return w;
  std::string candidate = apply_rules(w);
  // A rule result that would itself be rewritten again is rejected so the
  // mapping stays idempotent.
  if (candidate != w && is_fixed_point(candidate)) return candidate;
  return w;
}

}  // namespace cdisc
