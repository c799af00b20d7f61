#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "termcorpus/types.h"

namespace termcorpus {

struct TermAnnotation {
  TermPair term;
  std::size_t target_ngram = 0;  // token length of term.target_term
  std::size_t count_in_sentence = 1;

  friend bool operator==(const TermAnnotation&, const TermAnnotation&) = default;
};

// A sentence pair with at least one matched dictionary term.
struct MatchedSentence {
  SentencePair pair;
  std::vector<TermAnnotation> annotations;
  std::size_t max_ngram = 0;

  SentenceId id() const { return pair.id; }

  friend bool operator==(const MatchedSentence&, const MatchedSentence&) = default;
};

struct MatchedCorpus {
  std::vector<MatchedSentence> sentences;
  TermDictionary dictionary;  // provenance; empty when loaded from JSONL

  std::size_t size() const { return sentences.size(); }
  bool empty() const { return sentences.empty(); }
};

struct MatchOptions {
  bool casefold = false;    // ASCII case-insensitive comparison
  bool multi_pass = false;  // rescan the dictionary until nothing matches
};

// Original token positions removed by each match, in annotation order; a
// multi-pass repeat of an entry appends another event.
struct MatchTrace {
  struct Event {
    std::size_t entry = 0;  // dictionary index
    std::vector<std::size_t> source_positions;
    std::vector<std::size_t> target_positions;
  };
  std::vector<Event> events;
};

// Consume-on-match term finder. Entries are tried in dictionary order; an
// entry matches when its target tokens occur contiguously in the working
// target and its source tokens occur contiguously in the working source. The
// leftmost occurrence on each side is then removed from the working copies.
//
// The dictionary must outlive the matcher.
class TermMatcher {
 public:
  explicit TermMatcher(const TermDictionary& dictionary,
                       MatchOptions options = {});

  std::optional<MatchedSentence> match(const SentencePair& pair,
                                       MatchTrace* trace = nullptr) const;

  const TermDictionary& dictionary() const { return *dictionary_; }

 private:
  std::vector<std::size_t> candidates(const Tokens& source,
                                      const Tokens& target) const;

  const TermDictionary* dictionary_;
  MatchOptions options_;
  std::vector<Tokens> source_keys_;
  std::vector<Tokens> target_keys_;
  // First target token -> entry indices, ascending.
  std::unordered_map<std::string, std::vector<std::size_t>> by_first_token_;
};

std::optional<MatchedSentence> match_terms(const SentencePair& pair,
                                           const TermDictionary& dictionary,
                                           const MatchOptions& options = {});

// Applies match_terms to every pair, dropping pairs without a match. Output
// order equals input order for any thread count.
MatchedCorpus build_matched_corpus(std::span<const SentencePair> corpus,
                                   const TermDictionary& dictionary,
                                   const MatchOptions& options = {},
                                   unsigned threads = 1);

// Leftmost start of `needle` as a contiguous run inside `haystack`.
std::optional<std::size_t> find_subsequence(std::span<const std::string> haystack,
                                            std::span<const std::string> needle);

// Matched-corpus JSONL, one object per sentence with keys in the order
// id, src, tgt, terms[{src, tgt, l, count}], max_ngram.
std::string to_jsonl(const MatchedSentence& sentence);
MatchedSentence parse_matched_sentence(std::string_view line,
                                       std::size_t line_no = 0);

void write_matched_corpus(std::span<const MatchedSentence> sentences,
                          std::ostream& out);
void save_matched_corpus(std::span<const MatchedSentence> sentences,
                         const std::filesystem::path& path);
std::vector<MatchedSentence> read_matched_corpus(std::istream& in);
MatchedCorpus load_matched_corpus(const std::filesystem::path& path);

}  // namespace termcorpus
