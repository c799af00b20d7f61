#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "termcorpus/matcher.h"

namespace termcorpus {

struct CorpusStats {
  std::size_t n_sentences = 0;
  double avg_words_src = 0.0;
  double avg_words_tgt = 0.0;
  std::size_t n_terms = 0;  // annotation instances, repeats included
  double avg_terms_per_sent = 0.0;
  std::size_t unique_terms_src = 0;
  std::size_t unique_terms_tgt = 0;
};

// Term n-gram length -> annotation instances.
struct NgramHistogram {
  std::map<std::size_t, std::size_t> counts;

  std::size_t total() const;
};

// Throws ValidationError on an empty corpus.
CorpusStats corpus_stats(const MatchedCorpus& corpus);

// Target terms by instance count, descending; ties by target text ascending.
std::vector<std::pair<std::string, std::size_t>> top_terms(const MatchedCorpus& corpus,
                                                           std::size_t k);

NgramHistogram ngram_histogram(const MatchedCorpus& corpus);

nlohmann::ordered_json to_json(const CorpusStats& stats);

// `n,count` rows for n = 1..max(20, longest n), zero bins included.
void write_histogram_csv(const NgramHistogram& histogram, std::ostream& out);
void write_top_terms_tsv(const std::vector<std::pair<std::string, std::size_t>>& terms,
                         std::ostream& out);

}  // namespace termcorpus
