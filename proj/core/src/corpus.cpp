// SPDX-License-Identifier: Apache-2.0
#include "rankarena/corpus.hpp"

#include <fstream>
#include <istream>
#include <set>
#include <string>

#include <json.hpp>

#include "rankarena/error.hpp"

namespace rankarena {
namespace {

// Decodes one UTF-8 code point starting at `i`, advancing `i`. Invalid bytes
// decode as themselves so arbitrary input never throws.
char32_t next_code_point(std::string_view s, std::size_t& i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  std::size_t len = 1;
  char32_t cp = b0;
  if (b0 >= 0xF0 && b0 <= 0xF4) {
    len = 4;
    cp = b0 & 0x07;
  } else if (b0 >= 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if (b0 >= 0xC2 && b0 < 0xE0) {
    len = 2;
    cp = b0 & 0x1F;
  } else {
    ++i;
    return b0;
  }
  if (i + len > s.size()) {
    ++i;
    return b0;
  }
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) {
      ++i;
      return b0;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  i += len;
  return cp;
}

bool is_unicode_space(char32_t c) {
  return c == 0x85 || c == 0xA0 || c == 0x1680 || (c >= 0x2000 && c <= 0x200A) ||
         c == 0x2028 || c == 0x2029 || c == 0x202F || c == 0x205F || c == 0x3000;
}

bool is_separator(char32_t c) {
  if (c < 0x80) {
    const auto a = static_cast<char>(c);
    return !((a >= 'a' && a <= 'z') || (a >= 'A' && a <= 'Z') || (a >= '0' && a <= '9'));
  }
  if (is_unicode_space(c)) return true;
  // Latin-1 punctuation and symbols, keeping the ordinal letters and micro sign.
  if (c >= 0xA1 && c <= 0xBF) return c != 0xAA && c != 0xB5 && c != 0xBA;
  if (c == 0xD7 || c == 0xF7) return true;
  if (c >= 0x2010 && c <= 0x206F) return true;  // general punctuation
  if (c >= 0x2E00 && c <= 0x2E7F) return true;  // supplemental punctuation
  if (c >= 0x3001 && c <= 0x303F) return true;  // CJK punctuation
  if (c >= 0xFF01 && c <= 0xFF0F) return true;  // fullwidth punctuation
  return false;
}

bool is_whitespace(char32_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f' ||
         is_unicode_space(c);
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string required_string(const nlohmann::json& record, const char* field,
                            std::string_view source, std::size_t line_no) {
  const auto it = record.find(field);
  if (it == record.end() || !it->is_string()) {
    throw ParseError(std::string(source) + ":" + std::to_string(line_no) +
                     ": missing string field '" + field + "'");
  }
  return it->get<std::string>();
}

}  // namespace

CorpusStats::CorpusStats(std::size_t doc_count,
                         std::map<std::string, std::size_t> doc_frequencies,
                         double avg_doc_len)
    : doc_count_(doc_count),
      doc_frequencies_(std::move(doc_frequencies)),
      avg_doc_len_(avg_doc_len) {
  if (doc_count_ == 0) throw ValidationError("corpus stats: doc_count must be positive");
  if (!(avg_doc_len_ > 0.0)) {
    throw ValidationError("corpus stats: average document length must be positive");
  }
  for (const auto& [term, df] : doc_frequencies_) {
    if (df == 0 || df > doc_count_) {
      throw ValidationError("corpus stats: document frequency of '" + term +
                            "' out of range");
    }
  }
}

std::size_t CorpusStats::df(std::string_view term) const {
  const auto it = doc_frequencies_.find(std::string(term));
  return it == doc_frequencies_.end() ? 0 : it->second;
}

std::vector<std::string> split_terms(std::string_view text) {
  std::vector<std::string> terms;
  std::string current;
  std::size_t i = 0;
  while (i < text.size()) {
    const std::size_t start = i;
    const char32_t cp = next_code_point(text, i);
    if (is_separator(cp)) {
      if (!current.empty()) terms.push_back(std::move(current));
      current.clear();
      continue;
    }
    if (cp >= 'A' && cp <= 'Z') {
      current.push_back(static_cast<char>(cp - 'A' + 'a'));
    } else {
      current.append(text.substr(start, i - start));
    }
  }
  if (!current.empty()) terms.push_back(std::move(current));
  return terms;
}

std::vector<std::string> tokenize(std::string_view text) {
  auto terms = split_terms(text);
  for (auto& t : terms) t = stem(t);
  return terms;
}

std::size_t word_count(std::string_view text) {
  std::size_t count = 0;
  bool in_word = false;
  std::size_t i = 0;
  while (i < text.size()) {
    const bool space = is_whitespace(next_code_point(text, i));
    if (!space && !in_word) ++count;
    in_word = !space;
  }
  return count;
}

std::string_view first_words(std::string_view text, std::size_t n) {
  std::size_t count = 0;
  bool in_word = false;
  std::size_t i = 0;
  while (i < text.size()) {
    const std::size_t start = i;
    const bool space = is_whitespace(next_code_point(text, i));
    if (space && in_word && count == n) return text.substr(0, start);
    if (!space && !in_word) ++count;
    in_word = !space;
  }
  return text;
}

CorpusStats compute_stats(std::span<const std::string> docs) {
  if (docs.empty()) throw ValidationError("compute_stats: empty corpus");
  std::map<std::string, std::size_t> df;
  std::size_t total_len = 0;
  for (const auto& doc : docs) {
    const auto terms = tokenize(doc);
    total_len += terms.size();
    const std::set<std::string> unique(terms.begin(), terms.end());
    for (const auto& t : unique) ++df[t];
  }
  return CorpusStats(docs.size(), std::move(df),
                     static_cast<double>(total_len) / static_cast<double>(docs.size()));
}

std::vector<Topic> parse_topics(std::istream& in, std::string_view source_name) {
  std::vector<Topic> topics;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string(source_name) + ":" + std::to_string(line_no) +
                       ": invalid JSON: " + e.what());
    }
    if (!record.is_object()) {
      throw ParseError(std::string(source_name) + ":" + std::to_string(line_no) +
                       ": expected a JSON object");
    }
    Topic topic;
    topic.query.id = required_string(record, "query_id", source_name, line_no);
    topic.query.text = required_string(record, "query", source_name, line_no);
    topic.seed.text = required_string(record, "seed_doc", source_name, line_no);
    topic.seed.query_id = topic.query.id;
    topic.seed.word_count = word_count(topic.seed.text);

    const auto where = std::string(source_name) + ":" + std::to_string(line_no);
    if (trim(topic.query.id).empty()) throw ValidationError(where + ": empty query_id");
    if (trim(topic.query.text).empty()) throw ValidationError(where + ": empty query text");
    if (topic.seed.word_count == 0) throw ValidationError(where + ": empty seed_doc");
    if (!seen.insert(topic.query.id).second) {
      throw ValidationError(where + ": duplicate query_id '" + topic.query.id + "'");
    }
    topics.push_back(std::move(topic));
  }
  return topics;
}

std::vector<Topic> load_topics(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open topic file " + path.string());
  return parse_topics(in, path.string());
}

std::vector<std::string> load_corpus_texts(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open corpus file " + path.string());
  std::vector<std::string> texts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      const auto record = nlohmann::json::parse(line);
      texts.push_back(required_string(record, "text", path.string(), line_no));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return texts;
}

}  // namespace rankarena
