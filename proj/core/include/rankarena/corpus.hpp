// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rankarena {

struct Query {
  std::string id;
  std::string text;
};

/// The shared initial document every agent starts a game with.
struct SeedDocument {
  std::string query_id;
  std::string text;
  std::size_t word_count = 0;
};

struct Topic {
  Query query;
  SeedDocument seed;
};

/// Document-frequency statistics over a reference corpus, consumed by BM25.
/// Immutable once built.
class CorpusStats {
 public:
  CorpusStats(std::size_t doc_count, std::map<std::string, std::size_t> doc_frequencies,
              double avg_doc_len);

  std::size_t doc_count() const noexcept { return doc_count_; }
  double avg_doc_len() const noexcept { return avg_doc_len_; }
  const std::map<std::string, std::size_t>& doc_frequencies() const noexcept {
    return doc_frequencies_;
  }
  /// Zero for terms never seen in the corpus.
  std::size_t df(std::string_view term) const;

  friend bool operator==(const CorpusStats&, const CorpusStats&) = default;

 private:
  std::size_t doc_count_;
  std::map<std::string, std::size_t> doc_frequencies_;
  double avg_doc_len_;
};

/// Reads a JSON Lines topic file (`query_id`, `query`, `seed_doc`).
/// Throws ParseError naming the line for malformed records and
/// ValidationError for duplicate ids or empty queries.
std::vector<Topic> load_topics(const std::filesystem::path& path);
std::vector<Topic> parse_topics(std::istream& in, std::string_view source_name);

/// Reads a JSON Lines corpus file with a `text` field per line.
std::vector<std::string> load_corpus_texts(const std::filesystem::path& path);

/// Lowercased terms split on whitespace and punctuation (hyphens included),
/// before stemming.
std::vector<std::string> split_terms(std::string_view text);

/// split_terms followed by stem(); the term sequence every ranker sees.
std::vector<std::string> tokenize(std::string_view text);

/// Number of whitespace-separated words. This is the unit of every word limit.
std::size_t word_count(std::string_view text);

/// Prefix of `text` ending with its `n`-th whitespace-separated word, or the
/// whole text if it has at most `n` words.
std::string_view first_words(std::string_view text, std::size_t n);

CorpusStats compute_stats(std::span<const std::string> docs);

/// Dictionary-free inflectional stemmer in the spirit of Krovetz: folds
/// plurals, past tense and -ing forms, leaves derivational suffixes alone.
/// Expects a lowercased word.
std::string stem(std::string_view word);

}  // namespace rankarena
