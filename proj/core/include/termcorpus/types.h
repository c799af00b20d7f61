#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace termcorpus {

using Tokens = std::vector<std::string>;
using SentenceId = std::size_t;

// Number of UTF-8 code points in `text`.
std::size_t utf8_length(std::string_view text);

// Splits on runs of ASCII whitespace; empty tokens are dropped.
Tokens split_tokens(std::string_view line);

std::string join_tokens(const Tokens& tokens);

// A non-empty sequence of whitespace-free tokens.
class Sentence {
 public:
  // Throws ValidationError if `tokens` is empty or a token is empty or
  // contains whitespace.
  explicit Sentence(Tokens tokens);

  // Tokenizes `line` on whitespace runs. Throws ValidationError when the
  // line holds no tokens.
  static Sentence parse(std::string_view line);

  const Tokens& tokens() const { return tokens_; }
  std::size_t size() const { return tokens_.size(); }
  const std::string& operator[](std::size_t i) const { return tokens_[i]; }

  // Tokens joined by single spaces.
  std::string str() const { return join_tokens(tokens_); }

  // Code points with token separators excluded.
  std::size_t char_count() const;

  friend bool operator==(const Sentence&, const Sentence&) = default;
  friend auto operator<=>(const Sentence&, const Sentence&) = default;

 private:
  Tokens tokens_;
};

struct SentencePair {
  SentenceId id = 0;
  Sentence source;
  Sentence target;

  friend bool operator==(const SentencePair&, const SentencePair&) = default;
};

// One bilingual dictionary entry.
struct TermPair {
  Sentence source_term;
  Sentence target_term;
  std::size_t source_chars = 0;
  std::size_t target_chars = 0;
  std::size_t target_ngram = 0;
  std::optional<std::string> dict_id;

  static TermPair make(Sentence source, Sentence target,
                       std::optional<std::string> dict_id = std::nullopt);

  // Code points of the space-joined target term; the primary sort key.
  std::size_t target_length() const { return target_chars + target_ngram - 1; }

  friend bool operator==(const TermPair&, const TermPair&) = default;
};

// Strict weak order used for every dictionary: longer target first, then
// target text ascending, then source text ascending.
bool dictionary_order(const TermPair& a, const TermPair& b);

// Dictionary entries, deduplicated on (source_term, target_term) and kept in
// dictionary_order. The first occurrence of a duplicate keeps its dict_id.
class TermDictionary {
 public:
  TermDictionary() = default;
  explicit TermDictionary(std::vector<TermPair> entries);

  const std::vector<TermPair>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  friend bool operator==(const TermDictionary&, const TermDictionary&) = default;

 private:
  std::vector<TermPair> entries_;
};

}  // namespace termcorpus
