#include "cdisc/preprocess.hpp"

#include <algorithm>
#include <fstream>

#include "cdisc/default_data.hpp"
#include "cdisc/error.hpp"
#include "text_io.hpp"

namespace cdisc {

namespace {

bool is_ascii_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_ascii_punct(unsigned char c) {
  return (c >= 0x21 && c <= 0x2f) || (c >= 0x3a && c <= 0x40) || (c >= 0x5b && c <= 0x60) ||
         (c >= 0x7b && c <= 0x7e);
}

bool is_terminal(unsigned char c) { return c == '.' || c == '!' || c == '?'; }

bool is_ascii_alpha(unsigned char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

}  // namespace

StopwordList::StopwordList(const std::vector<std::string>& words) {
  for (const auto& w : words) {
    auto lowered = to_lower_ascii(detail::trim(w));
    if (!lowered.empty()) words_.insert(std::move(lowered));
  }
}

StopwordList StopwordList::parse(std::string_view text) {
  std::vector<std::string> words;
  for (auto line : detail::split_lines(text)) {
    line = detail::trim(line);
    if (line.empty() || line.front() == '#') continue;
    words.emplace_back(line);
  }
  return StopwordList(words);
}

StopwordList StopwordList::load(const std::filesystem::path& path) {
  return parse(detail::read_file(path));
}

StopwordList StopwordList::builtin() { return parse(default_data::stopwords()); }

bool StopwordList::contains(std::string_view word) const {
  return words_.find(std::string(word)) != words_.end();
}

TokenStream tokenize(const RawDocument& doc) {
  TokenStream stream;
  Sentence sentence;
  std::string token;
  auto flush_token = [&] {
    if (!token.empty()) sentence.push_back(std::move(token));
    token.clear();
  };
  auto flush_sentence = [&] {
    flush_token();
    if (!sentence.empty()) stream.push_back(std::move(sentence));
    sentence.clear();
  };
  for (char ch : doc.text) {
    auto c = static_cast<unsigned char>(ch);
    if (is_terminal(c)) {
      flush_sentence();
    } else if (is_ascii_space(c) || is_ascii_punct(c)) {
      flush_token();
    } else {
      token.push_back(ch);
    }
  }
  flush_sentence();
  return stream;
}

TokenStream clean(const TokenStream& stream, const StopwordList& stops) {
  TokenStream out;
  out.reserve(stream.size());
  for (const auto& sentence : stream) {
    Sentence kept;
    for (const auto& token : sentence) {
      if (token.empty()) continue;
      bool alpha = std::all_of(token.begin(), token.end(),
                               [](char c) { return is_ascii_alpha(static_cast<unsigned char>(c)); });
      if (!alpha) continue;
      auto lowered = to_lower_ascii(token);
      if (stops.contains(lowered)) continue;
      kept.push_back(std::move(lowered));
    }
    if (!kept.empty()) out.push_back(std::move(kept));
  }
  return out;
}

TokenStream lemmatize(const TokenStream& stream, const Lemmatizer& lemmatizer) {
  TokenStream out;
  out.reserve(stream.size());
  for (const auto& sentence : stream) {
    Sentence lemmas;
    lemmas.reserve(sentence.size());
    for (const auto& token : sentence) lemmas.push_back(lemmatizer.lemma(token));
    out.push_back(std::move(lemmas));
  }
  return out;
}

TokenStream preprocess(const RawDocument& doc, const StopwordList& stops,
                       const Lemmatizer& lemmatizer) {
  return clean(lemmatize(clean(tokenize(doc), stops), lemmatizer), stops);
}

std::vector<RawDocument> read_corpus(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  std::vector<RawDocument> docs;
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      docs.push_back({file.filename().string(), detail::read_file(file)});
    }
    return docs;
  }
  if (!fs::exists(path)) throw Error(Errc::io, "corpus not found: " + path.string());
  auto text = detail::read_file(path);
  std::size_t line_no = 0;
  for (auto line : detail::split_lines(text)) {
    docs.push_back({path.filename().string() + ":" + std::to_string(++line_no), std::string(line)});
  }
  return docs;
}

void write_token_stream(const std::filesystem::path& path, const TokenStream& stream) {
  std::string out;
  for (const auto& sentence : stream) {
    for (std::size_t i = 0; i < sentence.size(); ++i) {
      if (i) out.push_back(' ');
      out += sentence[i];
    }
    out.push_back('\n');
  }
  detail::write_file(path, out);
}

TokenStream read_token_stream(const std::filesystem::path& path) {
  TokenStream stream;
  auto text = detail::read_file(path);
  for (auto line : detail::split_lines(text)) {
    Sentence sentence;
    for (auto tok : detail::split_whitespace(line)) sentence.emplace_back(tok);
    if (!sentence.empty()) stream.push_back(std::move(sentence));
  }
  return stream;
}

}  // namespace cdisc
