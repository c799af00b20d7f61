#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "termcorpus/types.h"

namespace termcorpus {

// Reads two line-aligned, pre-tokenized files. Ids are 0..n-1 in file order.
// Throws AlignmentError on a line-count mismatch and ValidationError on a
// line without tokens; both name the offending 1-based line.
std::vector<SentencePair> read_corpus(std::istream& source,
                                      std::istream& target);
std::vector<SentencePair> load_corpus(const std::filesystem::path& source,
                                      const std::filesystem::path& target);

// One sentence per line, single-space separated, '\n' terminated.
void write_corpus(std::span<const SentencePair> corpus, std::ostream& source,
                  std::ostream& target);
void save_corpus(std::span<const SentencePair> corpus,
                 const std::filesystem::path& source,
                 const std::filesystem::path& target);

// TSV rows `source<TAB>target[<TAB>dict_id]`; `#` lines and blank lines are
// skipped. Throws FormatError naming the row when fewer than two columns are
// present or a term column is blank.
TermDictionary read_dictionary(std::istream& in);
TermDictionary load_dictionary(const std::filesystem::path& path);

struct RawTermEntry {
  std::string source_term;
  std::vector<std::string> target_terms;
  std::optional<std::string> dict_id;
};

// Pairs every source term with each of its translations.
TermDictionary expand_dictionary(std::span<const RawTermEntry> raw);

enum class FilterSide { kTarget, kSource, kBoth };

struct DictionaryFilter {
  std::size_t min_chars = 4;
  std::size_t max_ngram = 20;
  FilterSide side = FilterSide::kTarget;
};

// Keeps entries whose term (on the configured side) has at least `min_chars`
// code points, separators excluded, and at most `max_ngram` tokens.
TermDictionary filter_dictionary(const TermDictionary& dictionary,
                                 const DictionaryFilter& filter = {});

// Keeps pairs whose source and target both have at most `max_tokens` tokens.
// Ids are preserved.
std::vector<SentencePair> filter_corpus_by_length(
    std::span<const SentencePair> corpus, std::size_t max_tokens = 80);

FilterSide parse_filter_side(const std::string& name);

}  // namespace termcorpus
