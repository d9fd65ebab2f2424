#include "cdisc/vocab.hpp"

#include <algorithm>
#include <array>
#include <limits>

#include "cdisc/default_data.hpp"
#include "cdisc/error.hpp"
#include "text_io.hpp"

namespace cdisc {

void FrequencyTable::add(std::string_view token, std::uint64_t count) {
  if (count == 0) return;
  auto it = counts_.find(token);
  if (it == counts_.end()) {
    counts_.emplace(std::string(token), count);
  } else {
    it->second += count;
  }
  total_ += count;
}

void FrequencyTable::merge(const FrequencyTable& other) {
  for (const auto& [token, count] : other.counts_) add(token, count);
}

std::uint64_t FrequencyTable::count(std::string_view token) const {
  auto it = counts_.find(token);
  return it == counts_.end() ? 0 : it->second;
}

FrequencyTable count_frequencies(const TokenStream& corpus) {
  FrequencyTable table;
  for (const auto& sentence : corpus) {
    for (const auto& token : sentence) table.add(token);
  }
  return table;
}

FrequencyTable count_frequencies(const std::vector<TokenStream>& corpus) {
  FrequencyTable table;
  for (const auto& stream : corpus) table.merge(count_frequencies(stream));
  return table;
}

namespace {

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() > suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

constexpr std::array kNounSuffixes{"tion", "sion", "ment", "ness", "ity", "ship", "ance", "ence", "ism",
                                   "ist", "ery", "ette", "hood", "dom", "age", "ure", "eur", "ier"};
constexpr std::array kOtherSuffixes{"ly", "ful", "ous", "ive", "able", "ible", "less", "ish",
                                    "ize", "ise", "ify", "ate", "ing", "ed", "est"};

}  // namespace

LexiconTagger::LexiconTagger(std::unordered_set<std::string> nouns, bool unknown_is_noun)
    : nouns_(std::move(nouns)), unknown_is_noun_(unknown_is_noun) {}

LexiconTagger LexiconTagger::parse(std::string_view text, bool unknown_is_noun) {
  std::unordered_set<std::string> nouns;
  for (auto line : detail::split_lines(text)) {
    line = detail::trim(line);
    if (line.empty() || line.front() == '#') continue;
    nouns.emplace(line);
  }
  return LexiconTagger(std::move(nouns), unknown_is_noun);
}

LexiconTagger LexiconTagger::load(const std::filesystem::path& path, bool unknown_is_noun) {
  return parse(detail::read_file(path), unknown_is_noun);
}

LexiconTagger LexiconTagger::builtin(bool unknown_is_noun) {
  return parse(default_data::nouns(), unknown_is_noun);
}

bool LexiconTagger::is_noun(std::string_view token) const {
  if (nouns_.count(std::string(token))) return true;
  for (const char* suffix : kNounSuffixes) {
    if (ends_with(token, suffix)) return true;
  }
  for (const char* suffix : kOtherSuffixes) {
    if (ends_with(token, suffix)) return false;
  }
  return unknown_is_noun_;
}

namespace {

bool is_noun_tag(std::string_view tag) {
  return tag.substr(0, 2) == "NN" || tag == "NOUN" || tag == "PROPN";
}

}  // namespace

void PreTaggedTagger::observe(std::string_view token, std::string_view tag) {
  auto& votes = votes_[std::string(token)];
  if (is_noun_tag(tag)) {
    ++votes.noun;
  } else {
    ++votes.other;
  }
}

bool PreTaggedTagger::is_noun(std::string_view token) const {
  auto it = votes_.find(std::string(token));
  if (it == votes_.end()) return false;
  return it->second.noun >= it->second.other && it->second.noun > 0;
}

PreTaggedCorpus parse_pretagged(std::string_view text) {
  PreTaggedCorpus corpus;
  for (auto line : detail::split_lines(text)) {
    Sentence sentence;
    for (auto pair : detail::split_whitespace(line)) {
      auto slash = pair.rfind('/');
      if (slash == std::string_view::npos || slash == 0 || slash + 1 == pair.size()) continue;
      std::string token(pair.substr(0, slash));
      bool alpha = std::all_of(token.begin(), token.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
      });
      if (!alpha) continue;
      for (char& c : token) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
      }
      corpus.tagger.observe(token, pair.substr(slash + 1));
      sentence.push_back(std::move(token));
    }
    if (!sentence.empty()) corpus.tokens.push_back(std::move(sentence));
  }
  return corpus;
}

PreTaggedCorpus load_pretagged(const std::filesystem::path& path) {
  return parse_pretagged(detail::read_file(path));
}

std::vector<std::string> top_k_nouns(const FrequencyTable& freq, const PosTagger& tagger, std::size_t k) {
  if (k == 0) throw Error(Errc::invalid_argument, "top_k_nouns requires k >= 1");
  std::vector<std::pair<std::string_view, std::uint64_t>> nouns;
  for (const auto& [token, count] : freq.entries()) {
    if (tagger.is_noun(token)) nouns.emplace_back(token, count);
  }
  auto by_rank = [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  };
  const std::size_t take = std::min(k, nouns.size());
  std::partial_sort(nouns.begin(), nouns.begin() + static_cast<std::ptrdiff_t>(take), nouns.end(), by_rank);
  std::vector<std::string> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.emplace_back(nouns[i].first);
  return out;
}

std::vector<std::string> filter_by_candidates(const std::vector<std::string>& nouns, const EmbeddingMatrix& emb,
                                              const CandidateFilterConfig& cfg) {
  if (cfg.candidates.empty()) throw Error(Errc::invalid_argument, "candidate list is empty");
  if (cfg.threshold < 0.0) throw Error(Errc::invalid_argument, "candidate threshold must be >= 0");
  std::vector<std::span<const double>> candidate_rows;
  for (const auto& c : cfg.candidates) {
    auto idx = emb.index_of(c);
    if (!idx) throw Error(Errc::missing_candidate, "candidate noun has no vector: '" + c + "'");
    candidate_rows.push_back(emb.row(*idx));
  }
  std::vector<std::string> kept;
  for (const auto& noun : nouns) {
    auto idx = emb.index_of(noun);
    if (!idx) continue;
    double best = std::numeric_limits<double>::infinity();
    for (auto c : candidate_rows) best = std::min(best, cosine_distance(emb.row(*idx), c));
    if (best < cfg.threshold) kept.push_back(noun);
  }
  return kept;
}

std::vector<std::string> read_token_list(const std::filesystem::path& path) {
  std::vector<std::string> tokens;
  auto text = detail::read_file(path);
  for (auto line : detail::split_lines(text)) {
    line = detail::trim(line);
    if (!line.empty()) tokens.emplace_back(line);
  }
  return tokens;
}

void write_token_list(const std::filesystem::path& path, const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    out += t;
    out.push_back('\n');
  }
  detail::write_file(path, out);
}

}  // namespace cdisc
